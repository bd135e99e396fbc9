#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "entroflow/calculus.hpp"
#include "entroflow/qms.hpp"
#include "entroflow/statespace.hpp"

namespace entroflow {

enum class GroupKind { free_group, free_coxeter };

/// Reduced word. Free group letters are +-j for generator j (1-based);
/// free Coxeter letters are j > 0 and self-inverse.
using Word = std::vector<int>;

std::string word_to_string(GroupKind kind, const Word& w);
Word inverse(GroupKind kind, const Word& w);
/// Reduced product a * b.
Word multiply(GroupKind kind, const Word& a, const Word& b);

struct GroupBall {
  GroupKind kind = GroupKind::free_group;
  int generators = 0;
  int radius = 0;
  std::vector<Word> words;  // length-lex order, identity first
  std::vector<int> length;
  std::map<Word, std::size_t> index;

  std::size_t size() const { return words.size(); }
  /// Throws InputError when w is not in the ball.
  std::size_t find(const Word& w) const;
  bool contains(const Word& w) const { return index.count(w) != 0; }
};

inline constexpr std::size_t kDefaultBallCap = 64;

/// Closed-form ball size (saturates at SIZE_MAX).
std::size_t ball_size(GroupKind kind, int k, int radius);
GroupBall enumerate_ball(GroupKind kind, int k, int radius, std::size_t cap = kDefaultBallCap);

/// l(g h^{-1}), the squared cocycle distance |b(g^{-1}) - b(h^{-1})|^2.
int word_distance(const GroupBall& ball, std::size_t g, std::size_t h);
int word_distance(const GroupBall& ball, const Word& g, const Word& h);

std::vector<double> uniform_weights(const GroupBall& ball);
/// w(g) proportional to exp(-mu l(g)).
std::vector<double> gibbs_weights(const GroupBall& ball, double mu);

struct BallSemigroup {
  GroupBall ball;
  std::vector<double> weights;
  Eigen::MatrixXd symbol;                  // psi(g, h) = l(g h^{-1})
  std::vector<Word> projection_labels;     // nontrivial prefixes of inverses
  std::vector<Eigen::VectorXi> projections;  // v_i(g) = [label i is a prefix of g^{-1}]
  Density phi;                             // diag(weights)
  Generator generator;                     // Schur multiplier with symbol psi
};

BallSemigroup build_ball_semigroup(const GroupBall& ball, const std::vector<double>& weights);

DiffCalculus ball_calculus(const BallSemigroup& sg);

/// Truncated left translation: (lambda_g)_{h, h'} = 1 iff h = g h'.
Matrix left_regular_observable(const GroupBall& ball, const Word& g);
/// Rows h with l(h) + l(g) <= R, on which truncation does not cut lambda_g.
std::vector<std::size_t> interior_rows(const GroupBall& ball, const Word& g);

struct EigenvalueRow {
  Word word;
  int length = 0;
  double observed_rate = 0.0;  // from <lambda_g, P_t(lambda_g)> on interior rows
  double max_error = 0.0;      // max |P_t(lambda_g) - e^{-t l(g)} lambda_g| on interior rows
};

std::vector<EigenvalueRow> eigenvalue_table(const BallSemigroup& sg, double t);

}  // namespace entroflow
