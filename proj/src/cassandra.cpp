#include "dpomdp/cassandra.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace dpomdp {
namespace {

struct Token {
    std::string text;
    std::size_t line;
};

std::vector<Token> tokenize(std::istream& in) {
    std::vector<Token> tokens;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string current;
        auto flush = [&] {
            if (!current.empty()) tokens.push_back({std::move(current), line_no});
            current.clear();
        };
        for (char c : line) {
            if (c == ':') {
                flush();
                tokens.push_back({":", line_no});
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                flush();
            } else {
                current.push_back(c);
            }
        }
        flush();
    }
    return tokens;
}

std::optional<double> to_number(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

std::optional<long> to_integer(const std::string& text) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

constexpr std::array<std::string_view, 9> kKeywords = {"discount", "values", "states", "actions",
                                                       "observations", "start", "T", "O", "R"};

enum class ValueKind { unset, reward, cost };

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    PomdpModel run() {
        while (!at_end()) statement();
        return finish();
    }

  private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    PomdpModel model_;
    ValueKind values_ = ValueKind::unset;
    bool have_discount_ = false;
    std::vector<Matrix> reward_;  // per action: rows s, columns s' * Z + z
    bool tables_allocated_ = false;

    bool at_end() const { return pos_ >= tokens_.size(); }
    std::size_t line() const { return at_end() ? (tokens_.empty() ? 0 : tokens_.back().line) : tokens_[pos_].line; }
    const std::string& peek(std::size_t ahead = 0) const {
        static const std::string empty;
        return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead].text : empty;
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line(), what); }

    std::string take() {
        if (at_end()) fail("unexpected end of file");
        return tokens_[pos_++].text;
    }

    void expect_colon() {
        if (peek() != ":") fail("expected ':' but found '" + peek() + "'");
        ++pos_;
    }

    /// A new statement starts at the current position.
    bool at_statement_start() const {
        if (at_end()) return true;
        const std::string& t = peek();
        for (auto k : kKeywords) {
            if (t != k) continue;
            if (peek(1) == ":") return true;
            if (t == "start" && (peek(1) == "include" || peek(1) == "exclude")) return true;
        }
        return false;
    }

    double number() {
        const std::size_t at = line();
        const std::string t = take();
        auto v = to_number(t);
        if (!v) throw ParseError(at, "expected a number but found '" + t + "'");
        return *v;
    }

    std::vector<std::string> words_until_statement() {
        std::vector<std::string> out;
        while (!at_statement_start()) {
            if (peek(1) == ":") fail("unknown statement '" + peek() + "'");
            out.push_back(take());
        }
        return out;
    }

    void statement() {
        const std::string key = take();
        if (key == "discount") {
            expect_colon();
            model_.discount = number();
            have_discount_ = true;
        } else if (key == "values") {
            expect_colon();
            const std::string kind = take();
            if (kind == "reward")
                values_ = ValueKind::reward;
            else if (kind == "cost")
                values_ = ValueKind::cost;
            else
                fail("values must be 'reward' or 'cost', found '" + kind + "'");
        } else if (key == "states") {
            expect_colon();
            declare(model_.num_states, model_.state_names, "states");
        } else if (key == "actions") {
            expect_colon();
            declare(model_.num_actions, model_.action_names, "actions");
        } else if (key == "observations") {
            expect_colon();
            declare(model_.num_observations, model_.observation_names, "observations");
        } else if (key == "start") {
            start_statement();
        } else if (key == "T" || key == "O" || key == "R") {
            expect_colon();
            allocate();
            if (key == "T")
                transition_entry();
            else if (key == "O")
                observation_entry();
            else
                reward_entry();
        } else {
            fail("unsupported or unexpected token '" + key + "'");
        }
    }

    void declare(Index& count, std::vector<std::string>& names, const char* what) {
        if (tables_allocated_) fail(std::string(what) + " declared after T/O/R entries");
        auto words = words_until_statement();
        if (words.empty()) fail(std::string("empty ") + what + " declaration");
        if (words.size() == 1) {
            if (auto n = to_integer(words.front())) {
                if (*n <= 0) fail(std::string(what) + " count must be positive");
                count = *n;
                names.clear();
                return;
            }
        }
        count = static_cast<Index>(words.size());
        names = std::move(words);
    }

    void require_dimensions() {
        if (model_.num_states <= 0 || model_.num_actions <= 0 || model_.num_observations <= 0)
            fail("states, actions and observations must be declared first");
    }

    void allocate() {
        if (tables_allocated_) return;
        require_dimensions();
        const Index S = model_.num_states, A = model_.num_actions, Z = model_.num_observations;
        model_.transition.assign(A, Matrix::Zero(S, S));
        model_.observation.assign(A, Matrix::Zero(S, Z));
        reward_.assign(A, Matrix::Zero(S, S * Z));
        tables_allocated_ = true;
    }

    Index lookup(const std::string& token, Index count, const std::vector<std::string>& names, const char* what) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == token) return static_cast<Index>(i);
        if (auto n = to_integer(token); n && *n >= 0 && *n < count) return *n;
        fail(std::string("unknown ") + what + " '" + token + "'");
    }

    std::vector<Index> resolve(const std::string& token, Index count, const std::vector<std::string>& names,
                               const char* what) {
        std::vector<Index> out;
        if (token == "*") {
            for (Index i = 0; i < count; ++i) out.push_back(i);
        } else {
            out.push_back(lookup(token, count, names, what));
        }
        return out;
    }

    std::vector<std::string> specifiers() {
        std::vector<std::string> specs{take()};
        while (peek() == ":") {
            ++pos_;
            specs.push_back(take());
        }
        return specs;
    }

    std::vector<Index> actions(const std::string& t) {
        return resolve(t, model_.num_actions, model_.action_names, "action");
    }
    std::vector<Index> states(const std::string& t) {
        return resolve(t, model_.num_states, model_.state_names, "state");
    }
    std::vector<Index> observations(const std::string& t) {
        return resolve(t, model_.num_observations, model_.observation_names, "observation");
    }

    Vector numbers(Index count) {
        Vector v(count);
        for (Index i = 0; i < count; ++i) v(i) = number();
        return v;
    }

    void transition_entry() {
        const auto specs = specifiers();
        const Index S = model_.num_states;
        if (specs.size() > 3) fail("too many specifiers in T entry");
        const auto us = actions(specs[0]);
        if (specs.size() == 3) {
            const double p = number();
            for (Index u : us)
                for (Index s : states(specs[1]))
                    for (Index t : states(specs[2])) model_.transition[u](s, t) = p;
        } else if (specs.size() == 2) {
            Vector row = peek() == "uniform" ? (take(), Vector(Vector::Constant(S, 1.0 / S))) : numbers(S);
            for (Index u : us)
                for (Index s : states(specs[1])) model_.transition[u].row(s) = row.transpose();
        } else {
            Matrix m;
            if (peek() == "uniform") {
                take();
                m = Matrix::Constant(S, S, 1.0 / S);
            } else if (peek() == "identity") {
                take();
                m = Matrix::Identity(S, S);
            } else {
                m.resize(S, S);
                for (Index s = 0; s < S; ++s) m.row(s) = numbers(S).transpose();
            }
            for (Index u : us) model_.transition[u] = m;
        }
    }

    void observation_entry() {
        const auto specs = specifiers();
        const Index S = model_.num_states, Z = model_.num_observations;
        if (specs.size() > 3) fail("too many specifiers in O entry");
        const auto us = actions(specs[0]);
        if (specs.size() == 3) {
            const double p = number();
            for (Index u : us)
                for (Index s : states(specs[1]))
                    for (Index z : observations(specs[2])) model_.observation[u](s, z) = p;
        } else if (specs.size() == 2) {
            Vector row = peek() == "uniform" ? (take(), Vector(Vector::Constant(Z, 1.0 / Z))) : numbers(Z);
            for (Index u : us)
                for (Index s : states(specs[1])) model_.observation[u].row(s) = row.transpose();
        } else {
            Matrix m;
            if (peek() == "uniform") {
                take();
                m = Matrix::Constant(S, Z, 1.0 / Z);
            } else {
                m.resize(S, Z);
                for (Index s = 0; s < S; ++s) m.row(s) = numbers(Z).transpose();
            }
            for (Index u : us) model_.observation[u] = m;
        }
    }

    void reward_entry() {
        const auto specs = specifiers();
        const Index S = model_.num_states, Z = model_.num_observations;
        if (specs.size() < 2) fail("R entry needs at least an action and a start state");
        if (specs.size() > 4) fail("too many specifiers in R entry");
        const auto us = actions(specs[0]);
        const auto ss = states(specs[1]);
        if (specs.size() == 4) {
            const double r = number();
            for (Index u : us)
                for (Index s : ss)
                    for (Index t : states(specs[2]))
                        for (Index z : observations(specs[3])) reward_[u](s, t * Z + z) = r;
        } else if (specs.size() == 3) {
            const Vector row = numbers(Z);
            for (Index u : us)
                for (Index s : ss)
                    for (Index t : states(specs[2])) reward_[u].row(s).segment(t * Z, Z) = row.transpose();
        } else {
            const Vector block = numbers(S * Z);
            for (Index u : us)
                for (Index s : ss) reward_[u].row(s) = block.transpose();
        }
    }

    void start_statement() {
        require_dimensions();
        const Index S = model_.num_states;
        if (peek() == "include" || peek() == "exclude") {
            const bool include = take() == "include";
            expect_colon();
            Vector mask = include ? Vector::Zero(S) : Vector::Ones(S);
            for (const auto& w : words_until_statement())
                mask(lookup(w, S, model_.state_names, "state")) = include ? 1.0 : 0.0;
            if (mask.sum() <= 0.0) fail("start set is empty");
            model_.start = Belief(mask / mask.sum());
            return;
        }
        expect_colon();
        const std::size_t at = line();
        auto words = words_until_statement();
        if (words.size() == 1 && words.front() == "uniform") {
            model_.start = Belief::uniform(S);
        } else if (S == 1 && words.size() == 1) {
            model_.start = Belief::vertex(1, 0);
        } else if (static_cast<Index>(words.size()) == S && S > 1) {
            Vector p(S);
            for (Index s = 0; s < S; ++s) {
                auto v = to_number(words[s]);
                if (!v) throw ParseError(at, "start vector entry '" + words[s] + "' is not a number");
                p(s) = *v;
            }
            try {
                model_.start = Belief::normalized(p);
            } catch (const ValidationError& e) {
                throw ParseError(at, std::string("start: ") + e.what());
            }
        } else if (words.size() == 1) {
            model_.start = Belief::vertex(S, lookup(words.front(), S, model_.state_names, "state"));
        } else {
            throw ParseError(at, "start needs 'uniform', a state, or " + std::to_string(S) + " probabilities");
        }
    }

    static void normalize_rows(Matrix& m, const std::string& table, const PomdpModel& model, Index u) {
        for (Index r = 0; r < m.rows(); ++r) {
            const double total = m.row(r).sum();
            const double dev = std::abs(total - 1.0);
            auto where = [&] {
                std::ostringstream msg;
                msg << table << ": " << model.action_label(u) << " : "
                    << (r < static_cast<Index>(model.state_names.size()) ? model.state_names[r] : std::to_string(r));
                return msg.str();
            };
            if (m.row(r).minCoeff() < 0.0 || m.row(r).maxCoeff() > 1.0 + tol::renormalize)
                throw ValidationError(where() + " has an entry outside [0,1]");
            if (dev > tol::renormalize) {
                std::ostringstream msg;
                msg << where() << " sums to " << total << ", not 1";
                throw ValidationError(msg.str());
            }
            // Leave rounding-level residue alone so that write/parse round trips are exact.
            if (dev > 1e-12) m.row(r) /= total;
        }
    }

    PomdpModel finish() {
        if (!have_discount_) throw ParseError(line(), "missing 'discount'");
        if (values_ == ValueKind::unset) throw ParseError(line(), "missing 'values'");
        allocate();
        const Index S = model_.num_states, A = model_.num_actions, Z = model_.num_observations;
        for (Index u = 0; u < A; ++u) {
            normalize_rows(model_.transition[u], "T", model_, u);
            normalize_rows(model_.observation[u], "O", model_, u);
        }
        model_.cost.resize(S, A);
        for (Index u = 0; u < A; ++u) {
            for (Index s = 0; s < S; ++s) {
                const auto r = reward_[u].row(s);
                double expected;
                if (r.maxCoeff() == r.minCoeff()) {
                    expected = r(0);  // exact when the reward does not depend on (s', z)
                } else {
                    expected = 0.0;
                    for (Index t = 0; t < S; ++t)
                        for (Index z = 0; z < Z; ++z)
                            expected += model_.transition[u](s, t) * model_.observation[u](t, z) * r(t * Z + z);
                }
                model_.cost(s, u) = values_ == ValueKind::reward ? -expected : expected;
            }
        }
        model_.validate();
        return std::move(model_);
    }
};

bool usable_names(const std::vector<std::string>& names, Index count) {
    if (static_cast<Index>(names.size()) != count) return false;
    for (const auto& n : names) {
        if (n.empty() || n == "*" || to_number(n)) return false;
        for (char c : n)
            if (c == ':' || c == '#' || std::isspace(static_cast<unsigned char>(c))) return false;
        for (auto k : kKeywords)
            if (n == k) return false;
    }
    return true;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

PomdpModel parse_pomdp(std::istream& source) { return Parser(tokenize(source)).run(); }

PomdpModel parse_pomdp_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_pomdp(in);
}

void write_pomdp(const PomdpModel& model, std::ostream& out) {
    auto declare = [&](const char* key, const std::vector<std::string>& names, Index count) {
        out << key << ':';
        if (usable_names(names, count))
            for (const auto& n : names) out << ' ' << n;
        else
            out << ' ' << count;
        out << '\n';
    };
    out << "discount: " << fmt(model.discount) << '\n';
    out << "values: cost\n";
    declare("states", model.state_names, model.num_states);
    declare("actions", model.action_names, model.num_actions);
    declare("observations", model.observation_names, model.num_observations);
    if (model.start) {
        out << "start:";
        for (Index s = 0; s < model.num_states; ++s) out << ' ' << fmt((*model.start)[s]);
        out << '\n';
    }
    auto matrix = [&](const Matrix& m) {
        for (Index r = 0; r < m.rows(); ++r) {
            for (Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << fmt(m(r, c));
            out << '\n';
        }
    };
    for (Index u = 0; u < model.num_actions; ++u) {
        out << "\nT: " << u << '\n';
        matrix(model.transition[u]);
    }
    for (Index u = 0; u < model.num_actions; ++u) {
        out << "\nO: " << u << '\n';
        matrix(model.observation[u]);
    }
    out << '\n';
    for (Index u = 0; u < model.num_actions; ++u)
        for (Index s = 0; s < model.num_states; ++s)
            out << "R: " << u << " : " << s << " : * : * " << fmt(model.cost(s, u)) << '\n';
}

}  // namespace dpomdp
