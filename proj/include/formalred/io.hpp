#ifndef FORMALRED_IO_HPP
#define FORMALRED_IO_HPP

#include <cctype>
#include <string>
#include <string_view>

#include <json.hpp>

#include <formalred/reduction.hpp>

namespace formalred {

using json = nlohmann::ordered_json;

// Serialized budgets at or above this value mean "exact at every order".
inline constexpr long kKnownSentinel = 1000000000L;

struct SystemDocument {
    PuiseuxMatrix<Rational> series;
    std::string name;
    std::string description;
};

namespace io_detail {

inline long parse_index_key(const std::string& key) {
    if (key.empty()) throw std::invalid_argument("system document: empty coefficient index");
    for (char c : key)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("system document: coefficient index '" + key +
                                        "' is not a nonnegative integer");
    return std::stol(key);
}

// One term of the human-input sugar: [sign] [coef] [* ] [x[^exp]] with exp
// an integer or a rational like 1/2 or (-3/2).
struct SugarTerm {
    Rational coef;
    Rational exponent;
};

inline std::vector<SugarTerm> parse_sugar_entry(std::string_view text) {
    std::vector<SugarTerm> terms;
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) return terms;

    std::size_t pos = 0;
    auto peek = [&]() -> char { return pos < s.size() ? s[pos] : '\0'; };
    auto take_rational = [&]() -> Rational {
        std::size_t start = pos;
        if (peek() == '+' || peek() == '-') ++pos;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
        if (peek() == '/') {
            ++pos;
            if (peek() == '-') ++pos;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
        }
        return Rational::from_string(std::string_view(s).substr(start, pos - start));
    };

    while (pos < s.size()) {
        int sign = 1;
        while (peek() == '+' || peek() == '-') {
            if (peek() == '-') sign = -sign;
            ++pos;
        }
        Rational coef(1);
        bool saw_coef = false;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            coef = take_rational();
            saw_coef = true;
        }
        Rational expo(0);
        if (peek() == '*' && saw_coef) ++pos;
        if (peek() == 'x') {
            ++pos;
            expo = Rational(1);
            if (peek() == '^') {
                ++pos;
                if (peek() == '(') {
                    ++pos;
                    expo = take_rational();
                    if (peek() != ')')
                        throw std::invalid_argument("entry sugar: missing ')' in exponent");
                    ++pos;
                } else {
                    expo = take_rational();
                }
            }
        } else if (!saw_coef) {
            throw std::invalid_argument("entry sugar: cannot parse term in '" +
                                        std::string(text) + "'");
        }
        terms.push_back({sign < 0 ? -coef : coef, expo});
    }
    return terms;
}

} // namespace io_detail

// Parses a system document. The canonical schema carries n, q, pole,
// coeffs (index -> n x n array of rational strings) and known_through;
// alternatively an "entries" field holds an n x n array of expression
// strings like "x^-3 - x^-1 + 2" that desugars to the coefficient mapping
// before processing (the ramification is inferred from exponent
// denominators).
inline SystemDocument parse_system(const json& doc) {
    SystemDocument out;
    if (doc.contains("name")) out.name = doc.at("name").get<std::string>();
    if (doc.contains("description")) out.description = doc.at("description").get<std::string>();

    if (doc.contains("entries")) {
        const auto& rows = doc.at("entries");
        std::size_t n = rows.size();
        if (n == 0) throw std::invalid_argument("system document: empty entries matrix");
        std::vector<std::vector<std::vector<io_detail::SugarTerm>>> parsed(n);
        long q = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n)
                throw std::invalid_argument("system document: ragged entries matrix");
            parsed[i].resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                parsed[i][j] = io_detail::parse_sugar_entry(rows[i][j].get<std::string>());
                for (const auto& term : parsed[i][j])
                    q = std::lcm(q, term.exponent.den().to_longlong());
            }
        }
        long known = doc.contains("known_through")
                         ? doc.at("known_through").get<long>()
                         : kKnownSentinel;
        PuiseuxMatrix<Rational> s(n, q, known >= kKnownSentinel ? kKnownInf : known);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (const auto& term : parsed[i][j]) {
                    Matrix<Rational> cell(n, n);
                    cell(i, j) = term.coef;
                    long e = (term.exponent * Rational(q)).num().to_longlong();
                    s.add_coeff(e, cell);
                }
        out.series = normalize(s);
        return out;
    }

    std::size_t n = doc.at("n").get<std::size_t>();
    long q = doc.at("q").get<long>();
    long pole = doc.at("pole").get<long>();
    long known_j = doc.at("known_through").get<long>();
    if (n == 0) throw std::invalid_argument("system document: n must be positive");
    if (q < 1) throw std::invalid_argument("system document: q must be positive");
    if (pole < 0) throw std::invalid_argument("system document: pole must be nonnegative");

    long known_e = known_j >= kKnownSentinel ? kKnownInf : known_j - q * pole;
    PuiseuxMatrix<Rational> s(n, q, known_e);
    for (const auto& [key, value] : doc.at("coeffs").items()) {
        long j = io_detail::parse_index_key(key);
        if (j > known_j)
            throw std::invalid_argument("system document: coefficient index " + key +
                                        " beyond known_through");
        if (value.size() != n) throw std::invalid_argument("system document: ragged matrix");
        Matrix<Rational> m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (value[i].size() != n)
                throw std::invalid_argument("system document: ragged matrix row");
            for (std::size_t k = 0; k < n; ++k)
                m(i, k) = Rational::from_string(value[i][k].get<std::string>());
        }
        s.set_coeff(j - q * pole, m);
    }
    out.series = s;
    return out;
}

inline json emit_system(const PuiseuxMatrix<Rational>& series, const std::string& name = {},
                        const std::string& description = {}) {
    json doc;
    if (!name.empty()) doc["name"] = name;
    if (!description.empty()) doc["description"] = description;
    const long q = series.ram();
    const long pole = series.pole_order();
    doc["n"] = series.dim();
    doc["q"] = q;
    doc["pole"] = pole;
    json coeffs = json::object();
    for (const auto& [e, m] : series.support()) {
        json rows = json::array();
        for (std::size_t i = 0; i < series.dim(); ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < series.dim(); ++k) row.push_back(m(i, k).to_string());
            rows.push_back(std::move(row));
        }
        coeffs[std::to_string(e + q * pole)] = std::move(rows);
    }
    doc["coeffs"] = std::move(coeffs);
    doc["known_through"] =
        known_is_inf(series.known_e()) ? kKnownSentinel : series.known_e() + q * pole;
    return doc;
}

inline json emit_matrix(const Matrix<Rational>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).to_string());
        rows.push_back(std::move(row));
    }
    return rows;
}

// Cyclotomic numbers serialize as arrays of rational strings (coefficient
// vectors in omega); q travels with the enclosing document.
inline json emit_cyclo_matrix(const Matrix<CycloNumber>& m, const CycloContextPtr& ctx) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            json coeffs = json::array();
            CycloNumber v = m(i, j).context() ? m(i, j)
                                              : CycloNumber::from_rational(ctx, m(i, j).rational_part());
            for (const auto& c : v.coeffs()) coeffs.push_back(c.to_string());
            row.push_back(std::move(coeffs));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json emit_shearing(const Shearing& s) {
    json doc;
    doc["q"] = s.q;
    doc["exponents"] = s.exponents;
    return doc;
}

inline json emit_split_result(const SplitResult<Rational>& res) {
    json doc;
    doc["kind"] = "split_result";
    doc["partition"] = {res.partition.n1, res.partition.n2};
    long q = res.result.ram();
    long pole = res.result.pole_order();
    doc["certified_through"] = res.certified_e + q * pole;
    doc["transform"] = emit_system(res.transform);
    doc["result"] = emit_system(res.result);
    return doc;
}

inline json emit_rootfree_result(const RootFreeResult& rf) {
    json doc;
    doc["kind"] = "rootfree_result";
    doc["partition"] = {rf.partition.n1, rf.partition.n2};
    doc["shear"] = emit_shearing(rf.shear_used);
    doc["basis"] = emit_matrix(rf.basis_used);
    doc["block_diagonal"] = rf.block_diagonal;
    doc["frame"] = {{"q", rf.frame_q}, {"p", rf.frame_p}, {"pole", rf.frame_pole}};
    doc["certified_through"] = rf.certified_e;
    doc["transform"] = emit_system(rf.transform);
    doc["result"] = emit_system(rf.result);
    doc["split_frame"] = emit_system(rf.split_frame);
    doc["monodromy"] = emit_cyclo_matrix(rf.monodromy, cyclo_context(rf.frame_q));
    return doc;
}

inline json emit_charpoly(const Polynomial<Rational>& p) {
    json arr = json::array();
    for (const auto& c : p.coeffs()) arr.push_back(c.to_string());
    return arr;
}

inline json emit_tree(const DecompositionNode& node) {
    json doc;
    switch (node.kind) {
        case DecompositionNode::Kind::regular: doc["kind"] = "regular"; break;
        case DecompositionNode::Kind::leaf: doc["kind"] = "leaf"; break;
        case DecompositionNode::Kind::unresolved: doc["kind"] = "unresolved"; break;
        case DecompositionNode::Kind::split: doc["kind"] = "split"; break;
        case DecompositionNode::Kind::rootfree: doc["kind"] = "rootfree"; break;
        case DecompositionNode::Kind::shear: doc["kind"] = "shear"; break;
        case DecompositionNode::Kind::exp_shift: doc["kind"] = "exp_shift"; break;
    }
    doc["dim"] = node.dim;
    if (!node.note.empty()) doc["note"] = node.note;
    switch (node.kind) {
        case DecompositionNode::Kind::leaf:
            doc["q"] = node.leaf_q;
            doc["p"] = node.leaf_p;
            doc["slope"] = node.slope.to_string();
            doc["char_poly"] = emit_charpoly(node.leaf_charpoly);
            doc["single_orbit"] = node.single_orbit;
            if (node.single_orbit) {
                doc["orbit_multiplicity"] = node.orbit_multiplicity;
                doc["length"] = node.leaf_q * node.orbit_multiplicity;
            } else {
                doc["length"] = node.dim;
            }
            doc["block"] = emit_system(node.block);
            break;
        case DecompositionNode::Kind::regular:
        case DecompositionNode::Kind::unresolved:
            doc["block"] = emit_system(node.block);
            break;
        case DecompositionNode::Kind::split:
            doc["partition"] = {node.partition.n1, node.partition.n2};
            doc["basis"] = emit_matrix(node.basis);
            doc["transform"] = emit_system(node.transform);
            doc["certified_through_e"] = node.certified_e;
            break;
        case DecompositionNode::Kind::rootfree:
            doc["partition"] = {node.partition.n1, node.partition.n2};
            doc["shear"] = emit_shearing(node.shear);
            doc["basis"] = emit_matrix(node.basis);
            doc["transform"] = emit_system(node.transform);
            doc["certified_through_e"] = node.certified_e;
            break;
        case DecompositionNode::Kind::shear:
            doc["shear"] = emit_shearing(node.shear);
            if (node.basis.rows() > 0) doc["basis"] = emit_matrix(node.basis);
            break;
        case DecompositionNode::Kind::exp_shift:
            doc["lambda"] = node.shift_lambda.to_string();
            doc["k"] = node.shift_k.to_string();
            break;
    }
    if (!node.children.empty()) {
        json kids = json::array();
        for (const auto& c : node.children) kids.push_back(emit_tree(*c));
        doc["children"] = std::move(kids);
    }
    return doc;
}

inline json emit_newton(const std::vector<NewtonSlope>& slopes) {
    json arr = json::array();
    for (const auto& s : slopes)
        arr.push_back(json{{"slope", s.slope.to_string()}, {"length", s.length}});
    return json{{"kind", "newton_polygon"}, {"slopes", std::move(arr)}};
}

} // namespace formalred

#endif // FORMALRED_IO_HPP
