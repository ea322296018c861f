#include "moocgraph/token.hpp"

#include <stdexcept>

namespace moocgraph {

namespace {

constexpr std::array<std::string_view, kTokenCount> kSymbols = {
    "PL", "PA", "FW", "BW", "FS", "BS", "RCI", "RCD",
    "Po", "Co", "Th", "Uv", "Dv", "Vf", "Vt"};

}  // namespace

std::string_view to_string(Token t) { return kSymbols[index_of(t)]; }

std::optional<Token> parse_token(std::string_view symbol) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i) {
    if (kSymbols[i] == symbol) return kAllTokens[i];
  }
  return std::nullopt;
}

std::vector<Token> parse_token_string(std::string_view text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
    if (end > pos) {
      auto symbol = text.substr(pos, end - pos);
      auto token = parse_token(symbol);
      if (!token) {
        throw std::invalid_argument("unknown activity symbol '" + std::string(symbol) + "'");
      }
      out.push_back(*token);
    }
    pos = end;
  }
  return out;
}

std::string join_tokens(std::span<const Token> tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += sep;
    out += to_string(tokens[i]);
  }
  return out;
}

}  // namespace moocgraph
