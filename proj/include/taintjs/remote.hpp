#pragma once

#include <memory>
#include <string>

#include "taintjs/oracle.hpp"

namespace taintjs {

// Transport settings for the chat-with-tools protocol backend.
struct RemoteConfig {
    std::string host = "127.0.0.1";
    int port = 0;
    std::string path = "/v1/chat/completions";
    std::string model = "agent";
    std::string api_key;
    int max_tool_iterations = 24;  // assistant turns per run
    int timeout_seconds = 60;
};

// Backend speaking an OpenAI-style chat-completions wire format: system and
// user prompts, per-role tool schemas, and an iterative execute-and-reply
// loop until the agent signals completion or hits the iteration cap (which
// marks the run failed). Transport errors raise BackendUnavailable;
// malformed tool arguments are rejected back to the model once, then the
// run is marked failed.
std::unique_ptr<Backend> make_remote_backend(RemoteConfig config);

}  // namespace taintjs
