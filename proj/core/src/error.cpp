#include "wavecurve/error.hpp"

namespace wavecurve {

namespace {

std::string join_missing(const std::string& context, const std::vector<std::string>& missing) {
  std::string msg = context + ": missing units [";
  for (std::size_t i = 0; i < missing.size(); ++i) {
    if (i > 0) msg += ", ";
    msg += missing[i];
  }
  msg += "]";
  return msg;
}

std::string locate(const std::string& file, std::size_t row, const std::string& column,
                   const std::string& message) {
  std::string msg = file + ":" + std::to_string(row);
  if (!column.empty()) msg += " [" + column + "]";
  return msg + ": " + message;
}

}  // namespace

KeyedJoinError::KeyedJoinError(const std::string& context, std::vector<std::string> missing)
    : Error(join_missing(context, missing)), missing_(std::move(missing)) {}

ValidationError::ValidationError(std::string file, std::size_t row, std::string column,
                                 const std::string& message)
    : Error(locate(file, row, column, message)),
      file_(std::move(file)),
      row_(row),
      column_(std::move(column)) {}

}  // namespace wavecurve
