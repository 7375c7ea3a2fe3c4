#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ntp {

using TokenId = int;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionTooSmall : Error {
  DimensionTooSmall(int size, int dim)
      : Error("embedding dim " + std::to_string(dim) + " < vocabulary size " + std::to_string(size)) {}
};

struct UnknownToken : Error {
  TokenId token;
  explicit UnknownToken(TokenId t) : Error("unknown token id " + std::to_string(t)), token(t) {}
};

struct EmptySentence : Error {
  EmptySentence() : Error("sentence has no tokens") {}
};

struct ShapeError : Error {
  using Error::Error;
};

// Same input token list derived with two different labels.
struct NondeterministicLabel : Error {
  std::vector<TokenId> input;
  TokenId next_a;
  TokenId next_b;
  NondeterministicLabel(std::vector<TokenId> in, TokenId a, TokenId b);
};

struct IncompleteCollocation : Error {
  TokenId token;
  explicit IncompleteCollocation(TokenId t)
      : Error("no length-1 sample for token " + std::to_string(t)), token(t) {}
};

struct NotInjective : Error {
  TokenId a;
  TokenId b;
  NotInjective(TokenId a_, TokenId b_)
      : Error("tokens " + std::to_string(a_) + " and " + std::to_string(b_) + " share a successor"),
        a(a_),
        b(b_) {}
};

// Token sits on both sides of one query's partial order.
struct ConfusedToken : Error {
  TokenId query;
  TokenId token;
  ConfusedToken(TokenId q, TokenId t)
      : Error("token " + std::to_string(t) + " is confused under query " + std::to_string(q)),
        query(q),
        token(t) {}
};

struct SynthesisFailed : Error {
  int attempts;
  explicit SynthesisFailed(int n)
      : Error("corpus synthesis failed after " + std::to_string(n) + " attempts"), attempts(n) {}
};

struct ZeroMatrix : Error {
  ZeroMatrix() : Error("direction similarity of a zero matrix") {}
};

struct NoConvergence : Error {
  explicit NoConvergence(int iters)
      : Error("qp oracle did not converge within " + std::to_string(iters) + " iterations") {}
};

struct PatternUnavailable : Error {
  using Error::Error;
};

struct NoUnseenSentence : Error {
  using Error::Error;
};

struct InvalidFile : Error {
  using Error::Error;
};

}  // namespace ntp
