#include "amalgact/amalgam.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "amalgact/error.hpp"

namespace amalgact {

namespace detail {

struct AmalgamData {
  GroupSpec G, H;
  FiniteSubgroup AG, AH;
  std::vector<Element> phi;      // indexed by position in AG
  std::vector<Element> phi_inv;  // indexed by position in AH
};

}  // namespace detail

AmalgamSpec::AmalgamSpec(GroupSpec G, GroupSpec H, FiniteSubgroup A_in_G, FiniteSubgroup A_in_H,
                         std::vector<Element> phi_images) {
  if (!(A_in_G.ambient() == G)) throw GroupError("A_in_G is not a subgroup of G");
  if (!(A_in_H.ambient() == H)) throw GroupError("A_in_H is not a subgroup of H");
  if (A_in_G.size() != A_in_H.size()) throw GroupError("|A_in_G| != |A_in_H|");
  if (phi_images.size() != A_in_G.size()) throw GroupError("phi needs one image per element of A");
  std::vector<Element> inv(A_in_H.size());
  std::vector<bool> hit(A_in_H.size(), false);
  for (std::size_t i = 0; i < phi_images.size(); ++i) {
    if (!A_in_H.contains(phi_images[i])) throw GroupError("phi image outside A_in_H");
    auto j = A_in_H.position(phi_images[i]);
    if (hit[j]) throw GroupError("phi is not injective");
    hit[j] = true;
    inv[j] = A_in_G.elements()[i];
  }
  const auto& AGe = A_in_G.elements();
  for (std::size_t i = 0; i < AGe.size(); ++i) {
    for (std::size_t j = 0; j < AGe.size(); ++j) {
      auto k = A_in_G.position(multiply(AGe[i], AGe[j]));
      if (phi_images[k] != multiply(phi_images[i], phi_images[j])) {
        throw GroupError("phi is not a homomorphism at (" + G.name(AGe[i]) + "," + G.name(AGe[j]) + ")");
      }
    }
  }
  auto d = std::make_shared<detail::AmalgamData>(detail::AmalgamData{
      std::move(G), std::move(H), std::move(A_in_G), std::move(A_in_H), std::move(phi_images), std::move(inv)});
  data_ = std::move(d);
}

AmalgamSpec AmalgamSpec::free_product(GroupSpec G, GroupSpec H) {
  auto AG = FiniteSubgroup::trivial(G);
  auto AH = FiniteSubgroup::trivial(H);
  auto e = H.identity();
  return AmalgamSpec(std::move(G), std::move(H), std::move(AG), std::move(AH), {e});
}

const GroupSpec& AmalgamSpec::group(Side s) const { return s == Side::G ? data_->G : data_->H; }
const FiniteSubgroup& AmalgamSpec::A(Side s) const { return s == Side::G ? data_->AG : data_->AH; }

Element AmalgamSpec::phi(const Element& a) const { return data_->phi[data_->AG.position(a)]; }
Element AmalgamSpec::phi_inverse(const Element& b) const { return data_->phi_inv[data_->AH.position(b)]; }
Element AmalgamSpec::to_side(const Element& a_in_G, Side s) const { return s == Side::G ? a_in_G : phi(a_in_G); }
Element AmalgamSpec::to_G(const Element& a, Side from) const { return from == Side::G ? a : phi_inverse(a); }

AmalgamWord::AmalgamWord(AmalgamSpec spec, Element head, std::vector<Syllable> syllables)
    : spec_(std::move(spec)), head_(std::move(head)), syllables_(std::move(syllables)) {
  if (!spec_.A(Side::G).contains(head_)) throw GroupError("word head is not in A");
  for (std::size_t i = 0; i < syllables_.size(); ++i) {
    const auto& s = syllables_[i];
    const auto& A = spec_.A(s.side);
    if (!spec_.group(s.side).owns(s.element)) throw GroupError("syllable element does not match its factor tag");
    if (A.contains(s.element)) throw GroupError("syllable lies in A");
    if (coset_rep(s.element, A, CosetSide::Right) != s.element) {
      throw GroupError("syllable is not a canonical coset representative");
    }
    if (i > 0 && syllables_[i - 1].side == s.side) throw GroupError("adjacent syllables in the same factor");
  }
}

AmalgamWord AmalgamWord::identity(const AmalgamSpec& spec) { return AmalgamWord(spec, spec.G().identity(), {}); }

bool AmalgamWord::is_identity() const { return syllables_.empty() && head_ == spec_.G().identity(); }

bool word_less(const AmalgamWord& a, const AmalgamWord& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  for (std::size_t i = 0; i < a.length(); ++i) {
    const auto& x = a.syllables()[i];
    const auto& y = b.syllables()[i];
    if (x.side != y.side) return x.side < y.side;
    if (x.element != y.element) return x.element < y.element;
  }
  return a.head() < b.head();
}

namespace {

// y = a' * t with t the canonical right-coset rep; returns (a' moved to G, t).
std::pair<Element, Element> split(const AmalgamSpec& spec, Side s, const Element& y) {
  auto t = coset_rep(y, spec.A(s), CosetSide::Right);
  auto a = multiply(y, inverse(t));
  return {spec.to_G(a, s), t};
}

// Left-multiplies the normal form (head, syls) by a letter.
void absorb_left(const AmalgamSpec& spec, Element& head, std::deque<Syllable>& syls, const Syllable& letter) {
  const Side s = letter.side;
  Element y = multiply(letter.element, spec.to_side(head, s));
  if (!syls.empty() && syls.front().side == s) {
    y = multiply(y, syls.front().element);
    syls.pop_front();
  }
  auto [a, t] = split(spec, s, y);
  head = std::move(a);
  if (!spec.A(s).contains(t)) syls.push_front(Syllable{s, std::move(t)});
}

}  // namespace

AmalgamWord reduce(const AmalgamSpec& spec, std::span<const Syllable> raw) {
  Element head = spec.G().identity();
  std::deque<Syllable> syls;
  for (auto it = raw.rbegin(); it != raw.rend(); ++it) {
    if (!spec.group(it->side).owns(it->element)) throw GroupError("letter does not match its factor tag");
    absorb_left(spec, head, syls, *it);
  }
  return AmalgamWord(spec, std::move(head), std::vector<Syllable>(syls.begin(), syls.end()));
}

std::vector<Syllable> flatten(const AmalgamWord& w) {
  std::vector<Syllable> out;
  out.reserve(w.length() + 1);
  out.push_back(Syllable{Side::G, w.head()});
  out.insert(out.end(), w.syllables().begin(), w.syllables().end());
  return out;
}

AmalgamWord amalgam_multiply(const AmalgamWord& u, const AmalgamWord& v) {
  if (!(u.spec() == v.spec())) throw GroupError("amalgam_multiply: words over different amalgams");
  const auto& spec = u.spec();
  Element head = v.head();
  std::deque<Syllable> syls(v.syllables().begin(), v.syllables().end());
  auto left = flatten(u);
  for (auto it = left.rbegin(); it != left.rend(); ++it) absorb_left(spec, head, syls, *it);
  return AmalgamWord(spec, std::move(head), std::vector<Syllable>(syls.begin(), syls.end()));
}

AmalgamWord amalgam_inverse(const AmalgamWord& w) {
  auto letters = flatten(w);
  std::reverse(letters.begin(), letters.end());
  for (auto& l : letters) l.element = inverse(l.element);
  return reduce(w.spec(), letters);
}

std::vector<Element> transversal(const AmalgamSpec& spec, Side side, std::optional<std::size_t> ball_radius) {
  const auto& X = spec.group(side);
  const auto& A = spec.A(side);
  std::vector<Element> pool;
  if (X.is_finite()) {
    pool = enumerate(X, *X.order());
  } else {
    if (!ball_radius) {
      throw PreconditionError("factor " + std::string(1, side_letter(side)) +
                              " is infinite: a ball radius for coset representatives is required");
    }
    ElementSet seen{X.identity()};
    std::vector<Element> layer{X.identity()};
    pool = layer;
    for (std::size_t r = 0; r < *ball_radius; ++r) {
      std::vector<Element> next;
      for (const auto& x : layer) {
        for (const auto& s : X.symmetric_generators()) {
          auto y = multiply(x, s);
          if (seen.insert(y).second) next.push_back(y);
        }
      }
      pool.insert(pool.end(), next.begin(), next.end());
      layer = std::move(next);
    }
  }
  ElementSet reps;
  for (const auto& g : pool) {
    if (A.contains(g)) continue;
    reps.insert(coset_rep(g, A, CosetSide::Right));
  }
  std::vector<Element> out(reps.begin(), reps.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AmalgamWord> enumerate_words(const AmalgamSpec& spec, std::size_t max_length,
                                         const WordEnumerationOptions& options) {
  std::vector<Element> tG, tH;
  if (max_length > 0) {
    tG = transversal(spec, Side::G, options.ball_radius);
    tH = transversal(spec, Side::H, options.ball_radius);
  }
  const auto& heads = spec.A(Side::G).elements();
  std::vector<AmalgamWord> out;
  std::vector<Syllable> cur;
  auto grow = [&](auto&& self, std::size_t remaining, Side next) -> void {
    if (remaining == 0) {
      for (const auto& a : heads) out.emplace_back(spec, a, cur);
      return;
    }
    for (const auto& t : next == Side::G ? tG : tH) {
      cur.push_back(Syllable{next, t});
      self(self, remaining - 1, other(next));
      cur.pop_back();
    }
  };
  for (std::size_t len = 0; len <= max_length; ++len) {
    if (len == 0) {
      grow(grow, 0, Side::G);
      continue;
    }
    grow(grow, len, Side::G);
    grow(grow, len, Side::H);
  }
  std::stable_sort(out.begin(), out.end(), word_less);
  return out;
}

std::string to_text(const AmalgamWord& w) {
  std::string s = w.spec().G().name(w.head()) + " |";
  for (const auto& syl : w.syllables()) {
    s += ' ';
    s += side_letter(syl.side);
    s += ':';
    s += w.spec().group(syl.side).name(syl.element);
  }
  return s;
}

AmalgamWord parse_word(const AmalgamSpec& spec, std::string_view text) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos) throw GroupError("word text lacks '|': '" + std::string(text) + "'");
  std::istringstream head_in{std::string(text.substr(0, bar))};
  std::string head_tok, extra;
  if (!(head_in >> head_tok) || (head_in >> extra)) throw GroupError("word text needs exactly one head element");
  Element head = spec.G().parse(head_tok);
  std::istringstream rest{std::string(text.substr(bar + 1))};
  std::vector<Syllable> syls;
  std::string tok;
  while (rest >> tok) {
    if (tok.size() < 3 || tok[1] != ':' || (tok[0] != 'G' && tok[0] != 'H')) {
      throw GroupError("bad syllable token '" + tok + "'");
    }
    Side s = tok[0] == 'G' ? Side::G : Side::H;
    syls.push_back(Syllable{s, spec.group(s).parse(tok.substr(2))});
  }
  return AmalgamWord(spec, std::move(head), std::move(syls));
}

DoubleSpec::DoubleSpec(AmalgamSpec base, Homomorphism pi) : base_(std::move(base)), pi_(std::move(pi)) {
  if (!(pi_.source() == base_.G()) || !(pi_.target() == base_.H())) {
    throw GroupError("pi must map the G factor to the H factor");
  }
  std::vector<Element> imgs;
  for (const auto& g : base_.G().generators()) imgs.push_back(pi_(g));
  if (!generates(base_.H(), imgs)) throw GroupError("pi is not surjective");
  for (const auto& a : base_.A(Side::G).elements()) {
    if (pi_(a) != base_.phi(a)) throw GroupError("pi disagrees with phi on A at " + base_.G().name(a));
  }
}

DoubleSpec DoubleSpec::from_epimorphism(Homomorphism pi, FiniteSubgroup A) {
  std::vector<Element> images;
  for (const auto& a : A.elements()) images.push_back(pi(a));
  FiniteSubgroup AH(pi.target(), images);
  AmalgamSpec base(pi.source(), pi.target(), std::move(A), std::move(AH), images);
  return DoubleSpec(std::move(base), std::move(pi));
}

Element psi(const DoubleSpec& d, const AmalgamWord& w) {
  if (!(w.spec() == d.base())) throw GroupError("psi: word over a different amalgam");
  Element r = d.pi()(w.head());
  for (const auto& s : w.syllables()) r = multiply(r, s.side == Side::G ? d.pi()(s.element) : s.element);
  return r;
}

}  // namespace amalgact
