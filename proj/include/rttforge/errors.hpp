#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rttforge {

// A transition was applied outside its precondition. Carries the component
// ("sender", "tbf_s", ...) and a short rule name so callers can report it
// without parsing the message.
class PreconditionError : public std::logic_error {
 public:
  PreconditionError(std::string component, std::string rule,
                    const std::string& detail = {})
      : std::logic_error(component + ": " + rule +
                         (detail.empty() ? "" : " (" + detail + ")")),
        component_(std::move(component)),
        rule_(std::move(rule)) {}

  const std::string& component() const { return component_; }
  const std::string& rule() const { return rule_; }

 private:
  std::string component_;
  std::string rule_;
};

// A scripted replay failed at a given step.
class ScriptError : public std::runtime_error {
 public:
  ScriptError(std::size_t index, const std::string& what)
      : std::runtime_error("step " + std::to_string(index) + ": " + what),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace rttforge
