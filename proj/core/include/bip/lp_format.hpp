#pragma once

#include <stdexcept>
#include <string>

#include "bip/model.hpp"

namespace bip {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

// Writes the model in LP text format: objective, "Subject To" with labeled
// rows, Bounds for continuous [0,1] variables, Binary listing, "End".
// Names are sanitized to [A-Za-z0-9_()]; numbers carry 17 significant
// digits so doubles survive a round trip.
void write_lp(const LinearModel& model, const std::string& path);
std::string write_lp_string(const LinearModel& model);

// Reads the subset written by write_lp. Models are either all-binary or
// fully relaxed; mixed domains are rejected.
LinearModel parse_lp(const std::string& path);
LinearModel parse_lp_string(const std::string& content);

// Whitespace-separated "name value" lines; '#' and '\' start comments.
// Variables absent from the file default to 0.
Assignment read_solution(const std::string& path, const LinearModel& model);
Assignment read_solution_string(const std::string& content,
                                const LinearModel& model);

// The exported spelling of a variable or row label.
std::string sanitize_lp_name(const std::string& name);

}  // namespace bip
