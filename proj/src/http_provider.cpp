#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "star/fm.hpp"

namespace star {

namespace {

std::string env_or(const char* key, const std::string& fallback) {
    const char* v = std::getenv(key);
    return v ? std::string(v) : fallback;
}

std::string base64(const std::vector<std::uint8_t>& data) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < data.size(); i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < data.size()) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < data.size()) chunk |= data[i + 2];
        out.push_back(alphabet[(chunk >> 18) & 0x3f]);
        out.push_back(alphabet[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < data.size() ? alphabet[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < data.size() ? alphabet[chunk & 0x3f] : '=');
    }
    return out;
}

}  // namespace

HttpProvider::HttpProvider()
    : HttpProvider(env_or("STAR_FM_ENDPOINT", ""), env_or("STAR_FM_KEY", ""),
                   env_or("STAR_FM_MODEL", "gpt-4")) {}

HttpProvider::HttpProvider(std::string endpoint, std::string api_key, std::string model)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), model_(std::move(model)) {
    if (endpoint_.empty())
        throw ProviderError("no endpoint configured (set STAR_FM_ENDPOINT)");
}

std::string HttpProvider::do_complete(const PromptText& prompt, int max_tokens) {
    nlohmann::json body;
    body["model"] = model_;
    body["temperature"] = 0;
    body["max_tokens"] = max_tokens;

    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "system"}, {"content", prompt.system}});
    for (const auto& [request, tree] : prompt.few_shot) {
        messages.push_back({{"role", "user"}, {"content", request}});
        messages.push_back({{"role", "assistant"}, {"content", tree}});
    }
    if (prompt.images.empty()) {
        messages.push_back({{"role", "user"}, {"content", prompt.user}});
    } else {
        nlohmann::json content = nlohmann::json::array();
        content.push_back({{"type", "text"}, {"text", prompt.user}});
        for (const auto& img : prompt.images) {
            content.push_back(
                {{"type", "image_url"},
                 {"image_url", {{"url", "data:image/png;base64," + base64(img.png_bytes)}}}});
        }
        messages.push_back({{"role", "user"}, {"content", content}});
    }
    body["messages"] = messages;

    httplib::Client client(endpoint_);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw ProviderError("no response from " + endpoint_);
    if (res->status != 200)
        throw ProviderError("endpoint returned status " + std::to_string(res->status) + ": " +
                            res->body);
    try {
        nlohmann::json j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed completion response: ") + e.what());
    }
}

}  // namespace star
