#include "intimg/log.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <mutex>
#include <string>

namespace intimg::log {
namespace {

Level parse_env() {
    const char* env = std::getenv("INTIMG_LOG_LEVEL");
    if (env == nullptr) return Level::warn;
    const std::string v(env);
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    if (v == "warn" || v == "warning") return Level::warn;
    if (v == "error") return Level::error;
    if (v == "off" || v == "none") return Level::off;
    return Level::warn;
}

std::atomic<int>& threshold() {
    static std::atomic<int> value{static_cast<int>(parse_env())};
    return value;
}

const char* tag(Level lvl) {
    switch (lvl) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        default: return "";
    }
}

}  // namespace

Level level() { return static_cast<Level>(threshold().load()); }

void set_level(Level lvl) { threshold().store(static_cast<int>(lvl)); }

void write(Level lvl, std::string_view message) {
    if (static_cast<int>(lvl) < threshold().load() || lvl == Level::off) return;
    static std::mutex mutex;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%H:%M:%S", &tm);
    std::lock_guard lock(mutex);
    std::clog << '[' << stamp << "] [" << tag(lvl) << "] " << message << '\n';
}

}  // namespace intimg::log
