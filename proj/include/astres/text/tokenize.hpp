#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace astres::text {

/// Porter stemmer with the NLTK extensions (irregular-form table, the
/// two-letter passthrough and the revised step 1c/2 rules). Input is
/// expected to be lowercase.
std::string porter_stem(std::string_view word);

/// Lowercased words: maximal runs of ASCII letters, digits and non-ASCII
/// bytes.
std::vector<std::string> split_words(std::string_view text);

/// split_words followed by porter_stem; the one pipeline used for column
/// documents, questions and values.
std::vector<std::string> tokenize(std::string_view text);

} // namespace astres::text
