// SPDX-License-Identifier: Apache-2.0
#include "rankarena/templates.hpp"

#include <fstream>
#include <sstream>

#include "rankarena/error.hpp"

namespace rankarena {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read template " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void strip_one_newline(std::string& s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

void PromptTemplates::strip_final_newlines() {
  for (auto* s : {&version, &init, &nofeedback, &lsw, &paw}) strip_one_newline(*s);
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.version = read_file(dir / "VERSION");
  t.init = read_file(dir / "init.txt");
  t.nofeedback = read_file(dir / "nofeedback.txt");
  t.lsw = read_file(dir / "lsw.txt");
  t.paw = read_file(dir / "paw.txt");
  t.strip_final_newlines();
  return t;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_name_char(tmpl[j])) ++j;
      if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
        const auto name = tmpl.substr(i + 1, j - i - 1);
        const auto it = values.find(name);
        if (it == values.end()) {
          throw ValidationError("template placeholder {" + std::string(name) + "} has no value");
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  return out;
}

}  // namespace rankarena
