#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "pplfilter/baselines/hashed_linear.hpp"
#include "pplfilter/baselines/logistic_sgd.hpp"
#include "pplfilter/baselines/model_io.hpp"
#include "pplfilter/baselines/naive_bayes.hpp"
#include "pplfilter/baselines/tfidf.hpp"
#include "pplfilter/error.hpp"
#include "unit/helpers.hpp"

using namespace pplfilter;

namespace {

// Two classes whose documents share no word.
struct Disjoint {
  std::vector<TokenSeq> docs;
  std::vector<Label> y;
};

Disjoint disjoint_fixture(std::uint64_t seed, int per_class = 30) {
  const std::vector<std::string> a = {"lurid", "racy", "steamy", "bawdy", "saucy", "risque"};
  const std::vector<std::string> b = {"kernel", "matrix", "tensor", "vector", "scalar", "gradient"};
  std::mt19937_64 rng(seed);
  Disjoint f;
  for (int i = 0; i < 2 * per_class; ++i) {
    const bool harmful = i % 2 == 0;
    const auto& words = harmful ? a : b;
    TokenSeq d;
    for (std::size_t n = 2 + rng() % 6; n > 0; --n) d.push_back(words[rng() % words.size()]);
    f.docs.push_back(d);
    f.y.push_back(harmful ? Label::Harmful : Label::NonHarmful);
  }
  return f;
}

std::vector<SparseVector> vectorize(const TfidfVectorizer& v, const std::vector<TokenSeq>& docs) {
  std::vector<SparseVector> X;
  for (const auto& d : docs) X.push_back(v.transform(d));
  return X;
}

double l2(const SparseVector& x) {
  double s = 0;
  for (double v : x.value) s += v * v;
  return std::sqrt(s);
}

SparseVector dense(std::vector<double> values) {
  SparseVector x;
  for (std::uint32_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0) {
      x.index.push_back(i);
      x.value.push_back(values[i]);
    }
  }
  return x;
}

}  // namespace

TEST_CASE("tf-idf weights") {
  const std::vector<TokenSeq> docs = {{"a", "b"}, {"a"}};
  const TfidfVectorizer v = fit_tfidf(docs, 1.0, true, TfidfNorm::None);
  CHECK(v.terms() == std::vector<std::string>{"a", "b"});
  CHECK(v.idf()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v.idf()[1] == doctest::Approx(std::log(3.0 / 2.0) + 1).epsilon(1e-15));
  const TfidfVectorizer raw = fit_tfidf(docs, 1.0, false, TfidfNorm::None);
  CHECK(raw.idf()[1] == doctest::Approx(std::log(2.0) + 1).epsilon(1e-15));

  CHECK(v.transform(TokenSeq{"zz", "yy"}).nnz() == 0);
  const SparseVector x = v.transform(TokenSeq{"b", "a", "b"});
  CHECK(x.index == std::vector<std::uint32_t>{0, 1});
  CHECK(x.value[1] == doctest::Approx(2 * v.idf()[1]));

  // "a" occurs in every document
  CHECK(fit_tfidf(docs, 0.5).index_of("a") == -1);
  CHECK_THROWS_AS(fit_tfidf(docs, 0.0), InputError);
  CHECK_THROWS_AS(fit_tfidf(docs, 1.5), InputError);
  CHECK_THROWS_AS(fit_tfidf(std::vector<TokenSeq>{}), InputError);
}

TEST_CASE("l2-normalized vectors have unit norm") {
  const Disjoint f = disjoint_fixture(1);
  const TfidfVectorizer v = fit_tfidf(f.docs);
  for (const auto& x : vectorize(v, f.docs)) CHECK(l2(x) == doctest::Approx(1.0).epsilon(1e-12));
  for (double idf : v.idf()) CHECK(idf > 0);
}

TEST_CASE("naive bayes priors and hand-computed posteriors") {
  // 4 documents over 3 features; counts used directly as weights
  const std::vector<SparseVector> X = {dense({2, 1, 0}), dense({1, 0, 0}), dense({0, 1, 3}), dense({0, 0, 1})};
  const std::vector<Label> y = {Label::Harmful, Label::Harmful, Label::NonHarmful, Label::NonHarmful};
  const NaiveBayes nb = train_nb(X, y, 3, 1.0);
  CHECK(nb.log_prior[0] == doctest::Approx(std::log(0.5)));
  // harmful feature totals (3, 1, 0), N = 4; non-harmful (0, 1, 4), N = 5
  CHECK(nb.log_likelihood[0][0] == doctest::Approx(std::log(4.0 / 7.0)).epsilon(1e-14));
  CHECK(nb.log_likelihood[1][2] == doctest::Approx(std::log(5.0 / 8.0)).epsilon(1e-14));
  const SparseVector q = dense({1, 1, 1});
  const double h = 0.5 * (4.0 / 7) * (2.0 / 7) * (1.0 / 7);
  const double n = 0.5 * (1.0 / 8) * (2.0 / 8) * (5.0 / 8);
  CHECK(nb.posterior(q)[0] == doctest::Approx(h / (h + n)).epsilon(1e-12));
  CHECK(nb.predict(q).label == Label::Harmful);

  std::vector<SparseVector> X2(10, dense({1, 0, 0}));
  std::vector<Label> y2(10, Label::NonHarmful);
  for (int i = 0; i < 3; ++i) y2[i] = Label::Harmful;
  const NaiveBayes skew = train_nb(X2, y2, 3);
  CHECK(skew.log_prior[0] == doctest::Approx(std::log(0.3)));
  CHECK(skew.log_prior[1] == doctest::Approx(std::log(0.7)));
  CHECK_THROWS_AS(train_nb(X2, std::vector<Label>(10, Label::Harmful), 3), InputError);
}

TEST_CASE("naive bayes: duplicated training data with doubled alpha gives the same posteriors") {
  const Disjoint f = disjoint_fixture(2);
  const TfidfVectorizer v = fit_tfidf(f.docs);
  const auto X = vectorize(v, f.docs);
  std::vector<SparseVector> X2 = X;
  X2.insert(X2.end(), X.begin(), X.end());
  std::vector<Label> y2 = f.y;
  y2.insert(y2.end(), f.y.begin(), f.y.end());
  const NaiveBayes once = train_nb(X, f.y, v.size(), 0.3);
  const NaiveBayes twice = train_nb(X2, y2, v.size(), 0.6);
  for (const auto& x : X) CHECK(twice.posterior(x)[0] == doctest::Approx(once.posterior(x)[0]).epsilon(1e-12));
}

TEST_CASE("logistic sgd") {
  const Disjoint f = disjoint_fixture(3);
  const TfidfVectorizer v = fit_tfidf(f.docs);
  const auto X = vectorize(v, f.docs);

  const LogisticModel frozen = train_logistic_sgd(X, f.y, v.size(), 0.0, 5, 1);
  CHECK(std::all_of(frozen.weights.begin(), frozen.weights.end(), [](double w) { return w == 0.0; }));
  CHECK(frozen.bias == 0.0);

  const LogisticModel a = train_logistic_sgd(X, f.y, v.size(), 0.5, 10, 42);
  const LogisticModel b = train_logistic_sgd(X, f.y, v.size(), 0.5, 10, 42);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(a.predict(X[i]).label == f.y[i]);

  const LogisticModel biased{std::vector<double>(v.size(), 0.0), -0.7};
  const Prediction p = biased.predict(SparseVector{});
  CHECK(p.label == Label::NonHarmful);
  CHECK(p.score == doctest::Approx(1 - sigmoid(-0.7)));
  CHECK_THROWS_AS(train_logistic_sgd(X, f.y, v.size(), -1.0, 1, 1), InputError);
}

TEST_CASE("logistic sgd loss moves by at most the summed step lengths") {
  const Disjoint f = disjoint_fixture(4);
  const TfidfVectorizer v = fit_tfidf(f.docs, 1.0, true, TfidfNorm::None);
  const auto X = vectorize(v, f.docs);
  // Each per-example gradient has norm at most G = max sqrt(|x|^2 + 1) and the
  // loss is G-Lipschitz, so |dL| <= lr * steps * G^2.
  double g2 = 0;
  for (const auto& x : X) g2 = std::max(g2, l2(x) * l2(x) + 1);
  const LogisticModel zero{std::vector<double>(v.size(), 0.0), 0.0};
  const double before = log_loss(zero, X, f.y);
  for (double lr : {1e-6, 1e-4, 1e-2}) {
    const int epochs = 3;
    const LogisticModel m = train_logistic_sgd(X, f.y, v.size(), lr, epochs, 7);
    const double steps = static_cast<double>(epochs) * static_cast<double>(X.size());
    CHECK(std::abs(log_loss(m, X, f.y) - before) <= lr * steps * g2);
  }
}

TEST_CASE("hashed features and manual forward pass") {
  HashedLinearModel m;
  m.buckets = 7;
  m.dim = 2;
  m.word_ngrams = 2;
  m.input.resize(14);
  for (std::size_t i = 0; i < m.input.size(); ++i) m.input[i] = static_cast<float>(0.1 * static_cast<double>(i) - 0.5);
  m.output = {0.3f, -0.2f, -0.4f, 0.6f};

  const TokenSeq doc = {"red", "fox"};
  const std::vector<std::uint64_t> expected = {fnv1a64("red") % 7, fnv1a64("red fox") % 7, fnv1a64("fox") % 7};
  CHECK(m.features(doc) == expected);

  double h[2] = {0, 0};
  for (std::uint64_t b : expected) {
    for (int k = 0; k < 2; ++k) h[k] += m.input[b * 2 + static_cast<std::uint64_t>(k)] / 3.0;
  }
  const double z0 = m.output[0] * h[0] + m.output[1] * h[1];
  const double z1 = m.output[2] * h[0] + m.output[3] * h[1];
  const double p0 = 1.0 / (1.0 + std::exp(z1 - z0));
  CHECK(m.probabilities(doc)[0] == doctest::Approx(p0).epsilon(1e-12));
  CHECK(m.probabilities(TokenSeq{})[0] == 0.5);

  // published FNV-1a 64 test vectors
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("hashed classifier training") {
  const Disjoint f = disjoint_fixture(5);
  HashedLinearOptions o;
  o.buckets = 1 << 12;
  o.threads = 1;
  o.seed = 9;
  o.lr = 0.5;
  const HashedTrainResult a = train_hashed_linear(f.docs, f.y, o);
  const HashedTrainResult b = train_hashed_linear(f.docs, f.y, o);
  CHECK(a.model.input == b.model.input);
  CHECK(a.model.output == b.model.output);
  for (std::size_t i = 0; i < f.docs.size(); ++i) CHECK(a.model.predict(f.docs[i]).label == f.y[i]);

  std::vector<std::size_t> perm(f.docs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(77));
  std::vector<TokenSeq> docs;
  std::vector<Label> y;
  for (std::size_t i : perm) {
    docs.push_back(f.docs[i]);
    y.push_back(f.y[i]);
  }
  const HashedTrainResult c = train_hashed_linear(docs, y, o);
  CHECK(c.model.input == a.model.input);
  CHECK(c.model.output == a.model.output);

  HashedLinearOptions tiny = o;
  tiny.buckets = 2;
  CHECK_NOTHROW(train_hashed_linear(f.docs, f.y, tiny));

  std::vector<TokenSeq> with_empty = f.docs;
  std::vector<Label> y_empty = f.y;
  with_empty.push_back({});
  y_empty.push_back(Label::Harmful);
  CHECK(train_hashed_linear(with_empty, y_empty, o).skipped_empty == 1);

  HashedLinearOptions bad = o;
  bad.dim = 1;
  CHECK_THROWS_AS(train_hashed_linear(f.docs, f.y, bad), InputError);
}

TEST_CASE("baseline models survive save and load") {
  testing::TempDir dir("baseline_io");
  std::vector<Document> docs;
  const Disjoint f = disjoint_fixture(6);
  for (std::size_t i = 0; i < f.docs.size(); ++i) {
    Document d;
    d.id = std::to_string(i);
    for (const auto& w : f.docs[i]) d.content += w + " ";
    d.gold_label = f.y[i];
    docs.push_back(d);
  }
  BaselineOptions opts;
  opts.hashed.threads = 1;
  opts.hashed.buckets = 1 << 12;
  for (BaselineKind kind : {BaselineKind::NaiveBayes, BaselineKind::LogisticSgd, BaselineKind::Hashed}) {
    const BaselineModel m = train_baseline(kind, docs, opts).model;
    const auto path = dir / (std::string(baseline_kind_name(kind)) + ".model");
    save_baseline(m, path);
    const BaselineModel back = load_baseline(path);
    CHECK(back.kind == kind);
    for (const Document& d : docs) {
      const Prediction a = m.predict(d.content);
      const Prediction b = back.predict(d.content);
      CHECK(a.label == *d.gold_label);
      CHECK(a.label == b.label);
      CHECK(a.score == b.score);
    }
  }
  testing::write_file(dir / "junk.model", "not cbor");
  CHECK_THROWS_AS(load_baseline(dir / "junk.model"), InputError);
  CHECK_THROWS_AS(parse_baseline_kind("svm"), InputError);
}
