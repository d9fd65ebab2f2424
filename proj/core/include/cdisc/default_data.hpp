#pragma once

#include <string_view>

// Built-in copies of the files under data/, one entry per line.
namespace cdisc::default_data {

std::string_view stopwords();
std::string_view lemma_exceptions();
std::string_view nouns();

}  // namespace cdisc::default_data
