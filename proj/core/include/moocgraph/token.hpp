#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moocgraph {

// Canonical activity alphabet. Declaration order is the global tie-break
// order used everywhere (sorting, ranking, DOT output).
enum class Token : std::uint8_t {
  PL,   // play
  PA,   // pause
  FW,   // isolated forward seek
  BW,   // isolated backward seek
  FS,   // forward scroll
  BS,   // backward scroll
  RCI,  // playrate increase
  RCD,  // playrate decrease
  Po,   // post
  Co,   // comment
  Th,   // thread start
  Uv,   // upvote
  Dv,   // downvote
  Vf,   // view forum
  Vt,   // view thread
};

inline constexpr std::size_t kTokenCount = 15;

inline constexpr std::array<Token, kTokenCount> kAllTokens = {
    Token::PL, Token::PA, Token::FW, Token::BW, Token::FS,
    Token::BS, Token::RCI, Token::RCD, Token::Po, Token::Co,
    Token::Th, Token::Uv, Token::Dv, Token::Vf, Token::Vt};

enum class Source : std::uint8_t { Video, Forum };

constexpr std::size_t index_of(Token t) { return static_cast<std::size_t>(t); }

constexpr Source source_of(Token t) {
  return index_of(t) <= index_of(Token::RCD) ? Source::Video : Source::Forum;
}

constexpr bool is_video(Token t) { return source_of(t) == Source::Video; }
constexpr bool is_forum(Token t) { return source_of(t) == Source::Forum; }

// Passive: PL, PA (video); Vf, Vt, Uv, Dv (forum). Everything else is active.
constexpr bool is_passive(Token t) {
  switch (t) {
    case Token::PL:
    case Token::PA:
    case Token::Uv:
    case Token::Dv:
    case Token::Vf:
    case Token::Vt:
      return true;
    default:
      return false;
  }
}

constexpr bool is_active(Token t) { return !is_passive(t); }

std::string_view to_string(Token t);
std::optional<Token> parse_token(std::string_view symbol);

// Whitespace-separated symbols, e.g. "PL PA FW". Throws std::invalid_argument
// on an unknown symbol.
std::vector<Token> parse_token_string(std::string_view text);
std::string join_tokens(std::span<const Token> tokens, std::string_view sep = " ");

}  // namespace moocgraph
