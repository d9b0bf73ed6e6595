#pragma once

#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace wavecurve::log {

enum class Level { info, warning };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink and returns the previous one. The default
/// sink writes warnings to stderr and drops info messages.
Sink set_sink(Sink sink);

void info(std::string_view message);
void warn(std::string_view message);

/// Collects messages emitted while alive, forwarding nothing to the previous
/// sink. Used by the pipeline to record warnings in its manifest.
class Capture {
 public:
  Capture();
  ~Capture();
  Capture(const Capture&) = delete;
  Capture& operator=(const Capture&) = delete;

  std::vector<std::string> warnings() const;
  std::vector<std::string> infos() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> warnings_;
  std::vector<std::string> infos_;
  Sink previous_;
};

}  // namespace wavecurve::log
