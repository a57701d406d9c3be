#include "vdr/gateway.hpp"

#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vdr/rng.hpp"
#include "vdr/serialize.hpp"

namespace vdr {

ChatTurn system_turn(std::string content) {
    return ChatTurn{ChatTurn::Role::system, std::move(content), {}, ""};
}
ChatTurn user_turn(std::string content, std::vector<ImageRef> images) {
    return ChatTurn{ChatTurn::Role::user, std::move(content), std::move(images),
                    ""};
}
ChatTurn assistant_turn(std::string content) {
    return ChatTurn{ChatTurn::Role::assistant, std::move(content), {}, ""};
}
ChatTurn tool_turn(std::string content, std::string for_call) {
    return ChatTurn{ChatTurn::Role::tool, std::move(content), {},
                    std::move(for_call)};
}

namespace {

const char* role_name(ChatTurn::Role r) {
    switch (r) {
        case ChatTurn::Role::system: return "system";
        case ChatTurn::Role::user: return "user";
        case ChatTurn::Role::assistant: return "assistant";
        case ChatTurn::Role::tool: return "tool";
    }
    return "user";
}

}  // namespace

std::string chat_request_body(const std::string& model_name,
                              const std::vector<ChatTurn>& turns) {
    nlohmann::ordered_json body;
    body["model"] = model_name;
    nlohmann::ordered_json messages = nlohmann::ordered_json::array();
    for (const ChatTurn& t : turns) {
        nlohmann::ordered_json m;
        m["role"] = role_name(t.role);
        if (t.images.empty()) {
            m["content"] = t.content;
        } else {
            nlohmann::ordered_json parts = nlohmann::ordered_json::array();
            parts.push_back({{"type", "text"}, {"text", t.content}});
            for (const ImageRef& img : t.images) {
                // Sim payloads travel as a JSON data URL; encoded bytes as a
                // plain data URL the serving side can decode.
                std::string url;
                if (img.is_sim()) {
                    url = "data:application/x-vdr-sim;layout=" +
                          image_to_json(img).dump();
                } else {
                    url = "data:image/unknown;base64," +
                          image_to_json(img)["payload"]["data"]
                              .get<std::string>();
                }
                parts.push_back(
                    {{"type", "image_url"}, {"image_url", {{"url", url}}}});
            }
            m["content"] = std::move(parts);
        }
        if (t.role == ChatTurn::Role::tool && !t.for_call.empty())
            m["tool_call_id"] = t.for_call;
        messages.push_back(std::move(m));
    }
    body["messages"] = std::move(messages);
    return body.dump();
}

ReliableChatModel::ReliableChatModel(ChatModel& inner, RetryPolicy policy,
                                     std::uint64_t jitter_seed)
    : inner_(inner), policy_(policy), jitter_state_(splitmix64(jitter_seed)) {}

ChatResult ReliableChatModel::chat_with_info(const std::vector<ChatTurn>& turns) {
    std::string last_error;
    for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
        try {
            return ChatResult{inner_.chat(turns), attempt};
        } catch (const ChatTransientError& e) {
            last_error = e.what();
            if (attempt == policy_.max_attempts) break;
            double jitter;
            {
                std::lock_guard<std::mutex> lock(mu_);
                jitter_state_ = splitmix64(jitter_state_);
                jitter = unit_real(jitter_state_);
            }
            // full jitter: sleep uniform(0, base * 2^(attempt-1))
            auto cap = policy_.backoff_base.count() * (1LL << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::milliseconds(
                static_cast<std::int64_t>(jitter * static_cast<double>(cap))));
        }
    }
    throw ChatError("retries exhausted: " + last_error, policy_.max_attempts);
}

std::string ReliableChatModel::chat(const std::vector<ChatTurn>& turns) {
    return chat_with_info(turns).text;
}

ScriptedChatModel::ScriptedChatModel(std::string fixed_reply)
    : fn_([reply = std::move(fixed_reply)](const std::vector<ChatTurn>&) {
          return reply;
      }) {}

ScriptedChatModel::ScriptedChatModel(Fn fn) : fn_(std::move(fn)) {}

std::string ScriptedChatModel::chat(const std::vector<ChatTurn>& turns) {
    return fn_(turns);
}

struct HttpChatModel::Impl {
    httplib::Client client;
    std::counting_semaphore<1 << 20> permits;
    std::unique_ptr<ReliableChatModel> reliable;

    Impl(const std::string& base, int max_in_flight)
        : client(base), permits(max_in_flight) {}
};

namespace {

// Splits "http://host:port/v1" into client base and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? url.find('/')
                                        : url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    if (prefix == "/") prefix.clear();
    return {url.substr(0, path_start), prefix};
}

// Adapter that performs exactly one HTTP attempt, for ReliableChatModel.
class OneShot : public ChatModel {
  public:
    OneShot(HttpChatModel& outer,
            std::string (HttpChatModel::*fn)(const std::vector<ChatTurn>&))
        : outer_(outer), fn_(fn) {}
    std::string chat(const std::vector<ChatTurn>& turns) override {
        return (outer_.*fn_)(turns);
    }

  private:
    HttpChatModel& outer_;
    std::string (HttpChatModel::*fn_)(const std::vector<ChatTurn>&);
};

}  // namespace

HttpChatModel::HttpChatModel(ModelEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
    if (!endpoint_.valid())
        throw std::invalid_argument("HttpChatModel: invalid endpoint");
    auto [base, prefix] = split_base_url(endpoint_.base_url);
    impl_ = std::make_unique<Impl>(base, endpoint_.max_in_flight);
    path_prefix_ = prefix;
    impl_->client.set_connection_timeout(
        std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout));
    impl_->client.set_read_timeout(
        std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout));
}

HttpChatModel::~HttpChatModel() = default;

std::string HttpChatModel::chat_once(const std::vector<ChatTurn>& turns) {
    impl_->permits.acquire();
    struct Release {
        std::counting_semaphore<1 << 20>& s;
        ~Release() { s.release(); }
    } release{impl_->permits};

    httplib::Headers headers;
    if (const char* key = std::getenv(endpoint_.api_key_env.c_str());
        key != nullptr && *key != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto res = impl_->client.Post(path_prefix_ + "/chat/completions", headers,
                                  chat_request_body(endpoint_.model_name, turns),
                                  "application/json");
    if (!res)
        throw ChatTransientError("connection failure: " +
                                 httplib::to_string(res.error()));
    if (res->status >= 500)
        throw ChatTransientError("HTTP " + std::to_string(res->status));
    if (res->status != 200)
        throw ChatError("HTTP " + std::to_string(res->status) + ": " + res->body,
                        1);
    nlohmann::json j =
        nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw ChatTransientError("unparseable completion response");
    try {
        return j.at("choices").at(0).at("message").at("content")
            .get<std::string>();
    } catch (const std::exception& e) {
        throw ChatError(std::string("unexpected response shape: ") + e.what(),
                        1);
    }
}

ChatResult HttpChatModel::chat_with_info(const std::vector<ChatTurn>& turns) {
    OneShot one(*this, &HttpChatModel::chat_once);
    ReliableChatModel reliable(one, endpoint_.retry,
                               hash_str(endpoint_.base_url));
    return reliable.chat_with_info(turns);
}

std::string HttpChatModel::chat(const std::vector<ChatTurn>& turns) {
    return chat_with_info(turns).text;
}

}  // namespace vdr
