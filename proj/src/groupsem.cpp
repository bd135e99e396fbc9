#include "entroflow/groupsem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "entroflow/errors.hpp"

namespace entroflow {

namespace {

int letter_rank(GroupKind kind, int letter) {
  if (kind == GroupKind::free_coxeter) return letter - 1;
  return letter > 0 ? 2 * (letter - 1) : 2 * (-letter - 1) + 1;
}

int letter_inverse(GroupKind kind, int letter) { return kind == GroupKind::free_coxeter ? letter : -letter; }

std::vector<int> alphabet(GroupKind kind, int k) {
  std::vector<int> out;
  for (int j = 1; j <= k; ++j) {
    out.push_back(j);
    if (kind == GroupKind::free_group) out.push_back(-j);
  }
  return out;
}

bool length_lex_less(GroupKind kind, const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return letter_rank(kind, a[i]) < letter_rank(kind, b[i]);
  return false;
}

bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

std::string word_to_string(GroupKind kind, const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (int l : w) {
    const int j = std::abs(l);
    s += j <= 26 ? std::string(1, static_cast<char>('a' + j - 1)) : "s" + std::to_string(j);
    if (kind == GroupKind::free_group && l < 0) s += "^-1";
  }
  return s;
}

Word inverse(GroupKind kind, const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& l : out) l = letter_inverse(kind, l);
  return out;
}

Word multiply(GroupKind kind, const Word& a, const Word& b) {
  Word out = a;
  for (int l : b) {
    if (!out.empty() && out.back() == letter_inverse(kind, l))
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

std::size_t GroupBall::find(const Word& w) const {
  const auto it = index.find(w);
  if (it == index.end()) throw InputError("word " + word_to_string(kind, w) + " is not in the ball");
  return it->second;
}

std::size_t ball_size(GroupKind kind, int k, int radius) {
  if (k < 1 || radius < 0) throw InputError("ball_size: need k >= 1 and radius >= 0");
  const double first = kind == GroupKind::free_group ? 2.0 * k : static_cast<double>(k);
  const double branch = first - 1.0;
  double total = 1.0, shell = first;
  for (int m = 1; m <= radius; ++m) {
    total += shell;
    shell *= branch;
    if (shell == 0.0) break;
    if (total > 1e18) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(total);
}

GroupBall enumerate_ball(GroupKind kind, int k, int radius, std::size_t cap) {
  const std::size_t n = ball_size(kind, k, radius);
  if (n > cap)
    throw SizeError("ball of radius " + std::to_string(radius) + " has " +
                    (n == std::numeric_limits<std::size_t>::max() ? std::string("too many") : std::to_string(n)) +
                    " elements, above the cap of " + std::to_string(cap));
  GroupBall ball;
  ball.kind = kind;
  ball.generators = k;
  ball.radius = radius;
  ball.words.push_back({});
  std::vector<Word> shell{{}};
  const auto letters = alphabet(kind, k);
  for (int m = 1; m <= radius; ++m) {
    std::vector<Word> next;
    for (const Word& w : shell)
      for (int l : letters) {
        if (!w.empty() && w.back() == letter_inverse(kind, l)) continue;
        Word x = w;
        x.push_back(l);
        next.push_back(std::move(x));
      }
    for (const Word& w : next) ball.words.push_back(w);
    shell = std::move(next);
  }
  for (std::size_t i = 0; i < ball.words.size(); ++i) {
    ball.length.push_back(static_cast<int>(ball.words[i].size()));
    ball.index.emplace(ball.words[i], i);
  }
  return ball;
}

int word_distance(const GroupBall& ball, const Word& g, const Word& h) {
  ball.find(g);
  ball.find(h);
  // g h^{-1}: the common suffix of g and h cancels.
  std::size_t common = 0;
  while (common < g.size() && common < h.size() && g[g.size() - 1 - common] == h[h.size() - 1 - common]) ++common;
  return static_cast<int>(g.size() + h.size() - 2 * common);
}

int word_distance(const GroupBall& ball, std::size_t g, std::size_t h) {
  return word_distance(ball, ball.words.at(g), ball.words.at(h));
}

std::vector<double> uniform_weights(const GroupBall& ball) {
  return std::vector<double>(ball.size(), 1.0 / static_cast<double>(ball.size()));
}

std::vector<double> gibbs_weights(const GroupBall& ball, double mu) {
  std::vector<double> w(ball.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = std::exp(-mu * ball.length[i]));
  for (double& x : w) x /= total;
  return w;
}

BallSemigroup build_ball_semigroup(const GroupBall& ball, const std::vector<double>& weights) {
  const std::size_t n = ball.size();
  if (weights.size() != n) throw InputError("ball semigroup: weight vector has the wrong length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("ball semigroup: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("ball semigroup: weights must sum to 1");

  Eigen::MatrixXd psi(n, n);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h)
      psi(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) = word_distance(ball, g, h);

  // b(g^{-1}) is the indicator of the nontrivial prefixes of g^{-1}.
  std::vector<Word> inverses;
  std::set<Word> prefix_set;
  for (const Word& g : ball.words) {
    inverses.push_back(inverse(ball.kind, g));
    for (std::size_t m = 1; m <= inverses.back().size(); ++m)
      prefix_set.insert(Word(inverses.back().begin(), inverses.back().begin() + static_cast<std::ptrdiff_t>(m)));
  }
  std::vector<Word> labels(prefix_set.begin(), prefix_set.end());
  std::sort(labels.begin(), labels.end(), [&](const Word& a, const Word& b) { return length_lex_less(ball.kind, a, b); });
  std::vector<Eigen::VectorXi> projections;
  for (const Word& p : labels) {
    Eigen::VectorXi v(static_cast<Eigen::Index>(n));
    for (std::size_t g = 0; g < n; ++g) v(static_cast<Eigen::Index>(g)) = is_prefix(p, inverses[g]) ? 1 : 0;
    projections.push_back(std::move(v));
  }

  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      int s = 0;
      for (const auto& v : projections) {
        const int diff = v(static_cast<Eigen::Index>(g)) - v(static_cast<Eigen::Index>(h));
        s += diff * diff;
      }
      if (s != static_cast<int>(psi(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h))))
        throw NumericalError("ball semigroup: cocycle does not reproduce the word metric");
    }

  Density phi(HermitianOperator::diagonal(weights));
  Generator gen = build_generator(SchurSpec{psi});
  return BallSemigroup{ball, weights, std::move(psi), std::move(labels), std::move(projections), std::move(phi),
                       std::move(gen)};
}

DiffCalculus ball_calculus(const BallSemigroup& sg) { return DiffCalculus(sg.projections, sg.phi); }

Matrix left_regular_observable(const GroupBall& ball, const Word& g) {
  ball.find(g);
  const auto n = static_cast<Eigen::Index>(ball.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t hp = 0; hp < ball.size(); ++hp) {
    const Word h = multiply(ball.kind, g, ball.words[hp]);
    const auto it = ball.index.find(h);
    if (it != ball.index.end()) m(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(hp)) = 1.0;
  }
  return m;
}

std::vector<std::size_t> interior_rows(const GroupBall& ball, const Word& g) {
  std::vector<std::size_t> rows;
  for (std::size_t h = 0; h < ball.size(); ++h)
    if (ball.length[h] + static_cast<int>(g.size()) <= ball.radius) rows.push_back(h);
  return rows;
}

std::vector<EigenvalueRow> eigenvalue_table(const BallSemigroup& sg, double t) {
  if (!(t > 0.0)) throw InputError("eigenvalue_table: t must be positive");
  const SuperOperator p = sg.generator.heisenberg_propagator(t);
  std::vector<EigenvalueRow> out;
  for (const Word& g : sg.ball.words) {
    const Matrix lam = left_regular_observable(sg.ball, g);
    const Matrix plam = p.apply(lam);
    const double expected = std::exp(-t * static_cast<double>(g.size()));
    double num = 0.0, den = 0.0, err = 0.0;
    for (std::size_t r : interior_rows(sg.ball, g)) {
      const auto row = static_cast<Eigen::Index>(r);
      num += (lam.row(row).conjugate().cwiseProduct(plam.row(row))).sum().real();
      den += lam.row(row).squaredNorm();
      err = std::max(err, (plam.row(row) - expected * lam.row(row)).cwiseAbs().maxCoeff());
    }
    out.push_back({g, static_cast<int>(g.size()), -std::log(num / den) / t, err});
  }
  return out;
}

}  // namespace entroflow
