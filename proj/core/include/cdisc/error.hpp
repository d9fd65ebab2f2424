#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdisc {

enum class Errc {
  io,
  parse,
  invalid_argument,
  missing_candidate,
  empty_vocab,
  empty_input,
  zero_vector,
  malformed_header,
  dimension_mismatch,
  duplicate_token,
  unknown_token,
  too_few_items,
  degenerate_variance,
  k_out_of_range,
  single_cluster,
  duplicate_member,
  unknown_exclusion,
  missing_labels,
  empty_tree,
  empty_dataset,
  k_exceeds_data,
  invalid_model,
  config,
  stage_failed,
};

std::string_view to_string(Errc code);

// Every failure raised by the library carries one of the codes above so that
// callers (and tests) can branch on the kind of error without parsing text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cdisc
