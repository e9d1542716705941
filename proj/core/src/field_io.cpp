#include "biotms/field_io.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace biotms {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Splits on ASCII whitespace without going through locale-aware streams.
class Tokenizer {
 public:
  explicit Tokenizer(std::string text) : text_(std::move(text)) {}

  bool next(std::string_view& token) {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ >= text_.size()) return false;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    token = std::string_view(text_).substr(start, pos_ - start);
    return true;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

  std::string text_;
  std::size_t pos_ = 0;
};

template <class T>
T parse_number(std::string_view token, const std::filesystem::path& path, const char* what) {
  T value{};
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw InvalidInput("field file " + path.string() + ": cannot parse " + what + " '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

void save_field(const ScalarField& field, const std::filesystem::path& path) {
  if (static_cast<std::size_t>(field.rows) * static_cast<std::size_t>(field.cols) != field.values.size()) {
    throw InvalidInput("save_field: shape does not match value count");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_field: cannot open " + path.string());
  out << field.rows << ' ' << field.cols << '\n';
  for (int r = 0; r < field.rows; ++r) {
    for (int c = 0; c < field.cols; ++c) {
      if (c > 0) out << ' ';
      out << format_double(field.at(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_field: write failed for " + path.string());
}

ScalarField load_field(const std::filesystem::path& path, bool require_positive) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("load_field: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw InvalidInput("field file " + path.string() + ": missing header");

  std::istringstream hs(header);
  std::string rows_tok;
  std::string cols_tok;
  std::string extra;
  if (!(hs >> rows_tok >> cols_tok) || (hs >> extra)) {
    throw InvalidInput("field file " + path.string() + ": header must be '<rows> <cols>'");
  }
  ScalarField field;
  field.rows = parse_number<int>(rows_tok, path, "row count");
  field.cols = parse_number<int>(cols_tok, path, "column count");
  if (field.rows <= 0 || field.cols <= 0) throw InvalidInput("field file " + path.string() + ": non-positive shape");

  const std::size_t expected = static_cast<std::size_t>(field.rows) * static_cast<std::size_t>(field.cols);
  field.values.reserve(expected);
  Tokenizer tokens(std::string(std::istreambuf_iterator<char>(in), {}));
  std::string_view tok;
  while (tokens.next(tok)) {
    if (field.values.size() == expected) {
      throw InvalidInput("field file " + path.string() + ": more than " + std::to_string(expected) + " values");
    }
    const double v = parse_number<double>(tok, path, "value");
    if (require_positive && !(v > 0.0)) {
      throw InvalidInput("field file " + path.string() + ": non-positive value " + std::string(tok));
    }
    field.values.push_back(v);
  }
  if (field.values.size() != expected) {
    throw InvalidInput("field file " + path.string() + ": expected " + std::to_string(expected) + " values, found " +
                       std::to_string(field.values.size()));
  }
  return field;
}

void save_vector(const Vec& values, const std::filesystem::path& path) {
  ScalarField field{static_cast<int>(values.size()), 1, std::vector<double>(values.data(), values.data() + values.size())};
  save_field(field, path);
}

}  // namespace biotms
