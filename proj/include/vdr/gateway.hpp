#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdr/image.hpp"

namespace vdr {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{100};
};

struct ModelEndpoint {
    std::string base_url;     // e.g. http://host:port/v1
    std::string model_name;
    int max_in_flight = 4;
    std::chrono::milliseconds timeout{30000};
    RetryPolicy retry;
    std::string api_key_env = "VDR_MODEL_API_KEY";

    bool valid() const { return max_in_flight >= 1 && retry.max_attempts >= 1; }
};

struct ChatTurn {
    enum class Role { system, user, assistant, tool };
    Role role = Role::user;
    std::string content;
    std::vector<ImageRef> images;  // attached to user turns
    std::string for_call;          // tool turns reference a prior call id
};

ChatTurn system_turn(std::string content);
ChatTurn user_turn(std::string content, std::vector<ImageRef> images = {});
ChatTurn assistant_turn(std::string content);
ChatTurn tool_turn(std::string content, std::string for_call = "");

// Thrown when a chat call cannot be completed. `attempts` counts how many
// tries were made before giving up.
struct ChatError : std::runtime_error {
    int attempts = 0;
    ChatError(const std::string& what, int attempts_made)
        : std::runtime_error(what), attempts(attempts_made) {}
};

// A transient failure a retry may fix (5xx, timeout, connection reset).
struct ChatTransientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One chat-completion backend: message list in, assistant text out.
class ChatModel {
  public:
    virtual ~ChatModel() = default;
    virtual std::string chat(const std::vector<ChatTurn>& turns) = 0;
};

struct ChatResult {
    std::string text;
    int attempts = 1;
};

// Retry wrapper: exponential backoff with full jitter around any backend.
// Only ChatTransientError is retried.
class ReliableChatModel : public ChatModel {
  public:
    ReliableChatModel(ChatModel& inner, RetryPolicy policy,
                      std::uint64_t jitter_seed = 0);
    std::string chat(const std::vector<ChatTurn>& turns) override;
    ChatResult chat_with_info(const std::vector<ChatTurn>& turns);

  private:
    ChatModel& inner_;
    RetryPolicy policy_;
    std::uint64_t jitter_state_;
    std::mutex mu_;
};

// Test/sim fixture: replies come from a user-supplied function of the turns.
class ScriptedChatModel : public ChatModel {
  public:
    using Fn = std::function<std::string(const std::vector<ChatTurn>&)>;
    explicit ScriptedChatModel(std::string fixed_reply);
    explicit ScriptedChatModel(Fn fn);
    std::string chat(const std::vector<ChatTurn>& turns) override;

  private:
    Fn fn_;
};

// HTTP client for the standard chat-completion endpoint. Applies the
// endpoint's retry policy and bounds concurrent requests at max_in_flight.
class HttpChatModel : public ChatModel {
  public:
    explicit HttpChatModel(ModelEndpoint endpoint);
    ~HttpChatModel() override;
    std::string chat(const std::vector<ChatTurn>& turns) override;
    ChatResult chat_with_info(const std::vector<ChatTurn>& turns);
    const ModelEndpoint& endpoint() const { return endpoint_; }

  private:
    std::string chat_once(const std::vector<ChatTurn>& turns);

    ModelEndpoint endpoint_;
    std::string path_prefix_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Request body for the wire protocol (exposed for tests).
std::string chat_request_body(const std::string& model_name,
                              const std::vector<ChatTurn>& turns);

}  // namespace vdr
