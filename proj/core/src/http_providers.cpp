// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "rankarena/http_providers.hpp"

#include <thread>

#include "rankarena/error.hpp"
#include "rankarena/log.hpp"

namespace rankarena {
namespace {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

InflightLimiter::InflightLimiter(int max_inflight)
    : sem_(max_inflight < 1 ? 1 : (max_inflight > 4096 ? 4096 : max_inflight)) {}

nlohmann::json post_json(const HttpOptions& options, const nlohmann::json& body) {
  if (options.url.empty()) throw ConfigError("provider endpoint URL is not configured");
  const auto target = split_url(options.url);
  const auto payload = body.dump();
  std::string last_error;

  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options.backoff * (1 << (attempt - 1)));

    httplib::Client client(target.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout).count();
    client.set_connection_timeout(static_cast<time_t>(secs), 0);
    client.set_read_timeout(static_cast<time_t>(secs), 0);
    client.set_write_timeout(static_cast<time_t>(secs), 0);
    httplib::Headers headers;
    if (!options.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + options.api_key);
    }

    httplib::Result result = [&] {
      if (options.limiter) {
        InflightLimiter::Slot slot(*options.limiter);
        return client.Post(target.path, headers, payload, "application/json");
      }
      return client.Post(target.path, headers, payload, "application/json");
    }();

    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      log::warn("POST " + options.url + " failed (" + last_error + "), attempt " +
                std::to_string(attempt + 1));
      continue;
    }
    if (result->status != 200) {
      last_error = "HTTP " + std::to_string(result->status);
      if (!retryable(result->status)) break;
      log::warn("POST " + options.url + " returned " + last_error + ", attempt " +
                std::to_string(attempt + 1));
      continue;
    }
    try {
      return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw DecodeError("malformed JSON from " + options.url + ": " + e.what());
    }
  }
  throw ProviderError("POST " + options.url + " failed after " +
                      std::to_string(options.max_retries + 1) + " attempt(s): " + last_error);
}

HttpChatProvider::HttpChatProvider(HttpOptions options) : options_(std::move(options)) {}

std::string HttpChatProvider::complete(const ChatRequest& request) {
  nlohmann::json body{
      {"model", request.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"top_p", request.top_p},
      {"seed", request.sample_index},
  };
  const auto response = post_json(options_, body);
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("chat response lacks choices[0].message.content: ") + e.what());
  }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string model, HttpOptions options)
    : model_(std::move(model)), options_(std::move(options)) {}

std::vector<double> HttpEmbeddingProvider::compute_embedding(std::string_view text) {
  const auto response =
      post_json(options_, {{"model", model_}, {"input", std::string(text)}});
  try {
    return response.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("embedding response lacks data[0].embedding: ") + e.what());
  }
}

HttpNliProvider::HttpNliProvider(std::string model, HttpOptions options)
    : model_(std::move(model)), options_(std::move(options)) {}

double HttpNliProvider::raw_entail(std::string_view premise, std::string_view hypothesis) {
  const auto response = post_json(
      options_, {{"premise", std::string(premise)}, {"hypothesis", std::string(hypothesis)}});
  try {
    return response.at("probability").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("NLI response lacks numeric 'probability': ") + e.what());
  }
}

}  // namespace rankarena
