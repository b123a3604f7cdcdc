// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace rankarena {

/// The four prompt templates. Placeholders are `{name}`; see render_template.
/// The built-in set is compiled from core/templates/ and can be swapped for a
/// directory holding init.txt, nofeedback.txt, lsw.txt, paw.txt and VERSION.
struct PromptTemplates {
  std::string version;
  std::string init;
  std::string nofeedback;
  std::string lsw;
  std::string paw;

  static const PromptTemplates& builtin();
  static PromptTemplates load(const std::filesystem::path& dir);

  /// Files end with a newline that is not part of the prompt.
  void strip_final_newlines();
};

/// Single-pass substitution of `{name}` placeholders. Substituted values are
/// never rescanned, so document text containing braces is inserted verbatim.
/// Unknown placeholders throw ValidationError.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string, std::less<>>& values);

}  // namespace rankarena
