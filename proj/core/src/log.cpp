#include "wavecurve/log.hpp"

#include <iostream>

namespace wavecurve::log {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = [](Level level, std::string_view message) {
    if (level == Level::warning) std::cerr << "[wavecurve] warning: " << message << '\n';
  };
  return sink;
}

void emit(Level level, std::string_view message) {
  Sink sink;
  {
    std::lock_guard lock(sink_mutex());
    sink = current_sink();
  }
  if (sink) sink(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  Sink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void info(std::string_view message) { emit(Level::info, message); }
void warn(std::string_view message) { emit(Level::warning, message); }

Capture::Capture() {
  previous_ = set_sink([this](Level level, std::string_view message) {
    std::lock_guard lock(mutex_);
    (level == Level::warning ? warnings_ : infos_).emplace_back(message);
  });
}

Capture::~Capture() { set_sink(std::move(previous_)); }

std::vector<std::string> Capture::warnings() const {
  std::lock_guard lock(mutex_);
  return warnings_;
}

std::vector<std::string> Capture::infos() const {
  std::lock_guard lock(mutex_);
  return infos_;
}

}  // namespace wavecurve::log
