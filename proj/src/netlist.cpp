#include "mirrorsim/netlist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mirrorsim {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

struct Suffix {
    std::string_view text;
    double multiplier;
};

// `meg` must be tried before `m`.
constexpr std::array<Suffix, 9> kSuffixes{{
    {"meg", 1e6},
    {"f", 1e-15},
    {"p", 1e-12},
    {"n", 1e-9},
    {"u", 1e-6},
    {"m", 1e-3},
    {"k", 1e3},
    {"g", 1e9},
    {"t", 1e12},
}};

}  // namespace

double parse_value(std::string_view token, int line) {
    auto fail = [&](const std::string& why) -> double {
        throw NetlistError(line, "bad number '" + std::string(token) + "': " + why);
    };
    if (token.empty()) return fail("empty token");

    const std::string lower = to_lower(token);
    if (lower == "inf" || lower == "+inf") return std::numeric_limits<double>::infinity();

    // Numeral: [+-] digits [. digits] [e [+-] digits]
    std::size_t pos = 0;
    if (lower[pos] == '+' || lower[pos] == '-') ++pos;
    const std::size_t mantissa_start = pos;
    while (pos < lower.size() && is_digit(lower[pos])) ++pos;
    if (pos < lower.size() && lower[pos] == '.') {
        ++pos;
        while (pos < lower.size() && is_digit(lower[pos])) ++pos;
    }
    const std::size_t mantissa_len = pos - mantissa_start;
    if (mantissa_len == 0 || (mantissa_len == 1 && lower[mantissa_start] == '.')) {
        return fail("expected a decimal numeral");
    }
    if (pos < lower.size() && lower[pos] == 'e') {
        std::size_t q = pos + 1;
        if (q < lower.size() && (lower[q] == '+' || lower[q] == '-')) ++q;
        if (q < lower.size() && is_digit(lower[q])) {
            while (q < lower.size() && is_digit(lower[q])) ++q;
            pos = q;
        }
    }

    double value = 0.0;
    // from_chars rejects a leading '+'
    const std::size_t num_start = lower[0] == '+' ? 1 : 0;
    auto [ptr, ec] = std::from_chars(lower.data() + num_start, lower.data() + pos, value);
    if (ec != std::errc() || ptr != lower.data() + pos) return fail("malformed numeral");

    const std::string_view rest = std::string_view(lower).substr(pos);
    if (!std::all_of(rest.begin(), rest.end(), is_alpha)) return fail("unexpected characters after numeral");

    for (const auto& s : kSuffixes) {
        if (rest.substr(0, s.text.size()) == s.text) return value * s.multiplier;
    }
    // Unknown letters directly after the digits are units ("5V", "1Ohm").
    return value;
}

// ---------------------------------------------------------------------------
// Tokenizer and line classification
// ---------------------------------------------------------------------------

namespace {

// Splits on whitespace, commas and parentheses; glues `key = value` into one token.
std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> raw;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) raw.push_back(std::move(cur));
        cur.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' || c == ')') {
            flush();
        } else if (c == '=') {
            flush();
            raw.emplace_back("=");
        } else {
            cur.push_back(c);
        }
    }
    flush();

    std::vector<std::string> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "=" && !out.empty() && i + 1 < raw.size()) {
            out.back() += "=" + raw[i + 1];
            ++i;
        } else {
            out.push_back(raw[i]);
        }
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

const std::set<std::string> kDirectives{".op", ".dc", ".tran", ".four", ".model"};

}  // namespace

RawNetlist parse_netlist(std::string_view text) {
    RawNetlist raw;
    std::vector<std::pair<int, std::string>> logical;  // (line, joined text)

    std::size_t start = 0;
    int line_no = 0;
    bool first = true;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        start = end + 1;

        if (first) {
            raw.title = std::string(trim(line));
            first = false;
            if (end == text.size()) break;
            continue;
        }
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '*') {
            if (end == text.size()) break;
            continue;
        }
        if (t.front() == '+') {
            if (logical.empty()) throw NetlistError(line_no, "continuation line with nothing to continue");
            logical.back().second += ' ';
            logical.back().second += t.substr(1);
        } else {
            if (to_lower(tokenize(t).front()) == ".end") break;
            logical.emplace_back(line_no, std::string(t));
        }
        if (end == text.size()) break;
    }

    for (auto& [line, body] : logical) {
        // Inline comments: SPICE allows ';' to start one.
        if (auto semi = body.find(';'); semi != std::string::npos) body.resize(semi);
        auto tokens = tokenize(body);
        if (tokens.empty()) continue;
        const std::string head = to_lower(tokens.front());
        RawLine rec;
        rec.line = line;
        rec.tokens = std::move(tokens);
        if (head.front() == '.') {
            if (!kDirectives.contains(head)) {
                throw NetlistError(line, "unknown directive '" + rec.tokens.front() + "'");
            }
            rec.kind = RawLine::Kind::Directive;
        } else {
            const char letter = head.front();
            if (letter != 'r' && letter != 'v' && letter != 'i' && letter != 'q' && letter != 'm') {
                throw NetlistError(line, "unknown element '" + rec.tokens.front() + "'");
            }
            rec.kind = RawLine::Kind::Element;
        }
        raw.lines.push_back(std::move(rec));
    }
    return raw;
}

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

namespace {

struct KeyValue {
    std::string key;  // lower-case
    std::string value;
};

std::optional<KeyValue> split_key_value(const std::string& token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) return std::nullopt;
    return KeyValue{to_lower(token.substr(0, eq)), token.substr(eq + 1)};
}

ModelCard parse_model(const RawLine& rec) {
    const auto& tok = rec.tokens;
    if (tok.size() < 3) throw NetlistError(rec.line, ".model needs a name and a type");
    ModelCard card;
    card.name = tok[1];
    const std::string type = to_lower(tok[2]);

    auto params = [&](auto&& apply) {
        for (std::size_t i = 3; i < tok.size(); ++i) {
            auto kv = split_key_value(tok[i]);
            if (!kv) throw NetlistError(rec.line, "expected KEY=VALUE in .model, got '" + tok[i] + "'");
            apply(*kv);
        }
    };

    if (type == "npn") {
        BjtModel m;
        params([&](const KeyValue& kv) {
            const double v = parse_value(kv.value, rec.line);
            if (kv.key == "is") m.is_sat = v;
            else if (kv.key == "bf") m.bf = v;
            else if (kv.key == "vaf" || kv.key == "va") m.vaf = v;
            else if (kv.key == "br") m.br = v;
            else throw NetlistError(rec.line, "unknown NPN parameter '" + kv.key + "'");
        });
        if (!(m.is_sat > 0) || !(m.bf > 0) || !(m.br > 0) || !(m.vaf > 0)) {
            throw NetlistError(rec.line, "NPN model '" + card.name + "' requires IS, BF, BR, VAF > 0");
        }
        card.params = m;
    } else if (type == "memr") {
        MemristorModel m;
        params([&](const KeyValue& kv) {
            const double v = parse_value(kv.value, rec.line);
            if (kv.key == "ron") m.r_on = v;
            else if (kv.key == "roff") m.r_off = v;
            else if (kv.key == "d") m.d = v;
            else if (kv.key == "uv") m.mu_v = v;
            else if (kv.key == "p") {
                if (v != std::floor(v) || v < 1) throw NetlistError(rec.line, "P must be an integer >= 1");
                m.p = static_cast<int>(v);
            } else if (kv.key == "xinit") m.x_init = v;
            else if (kv.key == "window") m.window = v != 0.0;
            else throw NetlistError(rec.line, "unknown MEMR parameter '" + kv.key + "'");
        });
        if (!(m.r_on > 0) || !(m.r_on < m.r_off) || !(m.d > 0) || !(m.mu_v > 0) ||
            !(m.x_init >= 0 && m.x_init <= 1)) {
            throw NetlistError(rec.line, "MEMR model '" + card.name +
                                             "' requires 0 < RON < ROFF, D > 0, UV > 0, 0 <= XINIT <= 1");
        }
        card.params = m;
    } else {
        throw NetlistError(rec.line, "unsupported model type '" + tok[2] + "'");
    }
    return card;
}

Directive parse_directive(const RawLine& rec) {
    const auto& tok = rec.tokens;
    const std::string head = to_lower(tok[0]);
    auto num = [&](std::size_t i) { return parse_value(tok.at(i), rec.line); };

    if (head == ".op") return OpDirective{};
    if (head == ".dc") {
        if (tok.size() != 5) throw NetlistError(rec.line, ".dc expects: source start stop step");
        DcSweepDirective d{tok[1], num(2), num(3), num(4)};
        if (!(d.step > 0) || !(d.stop >= d.start)) {
            throw NetlistError(rec.line, ".dc requires step > 0 and stop >= start");
        }
        return d;
    }
    if (head == ".tran") {
        if (tok.size() < 3 || tok.size() > 4) throw NetlistError(rec.line, ".tran expects: tstep tstop [tstart]");
        TranDirective d{num(1), num(2), tok.size() == 4 ? num(3) : 0.0};
        if (!(d.tstep > 0) || !(d.tstart >= 0) || !(d.tstop > d.tstart)) {
            throw NetlistError(rec.line, ".tran requires tstep > 0 and tstop > tstart >= 0");
        }
        return d;
    }
    // .four freq [nharmonics] signal...
    if (tok.size() < 3) throw NetlistError(rec.line, ".four expects: freq [nharmonics] signal...");
    FourDirective d;
    d.fundamental = num(1);
    std::size_t i = 2;
    if (tok[2].find('(') == std::string::npos && is_digit(tok[2].front())) {
        const double n = num(2);
        if (n != std::floor(n)) throw NetlistError(rec.line, ".four harmonic count must be an integer");
        d.nharmonics = static_cast<int>(n);
        i = 3;
    }
    if (!(d.fundamental > 0)) throw NetlistError(rec.line, ".four requires a positive fundamental");
    if (d.nharmonics < 2) throw NetlistError(rec.line, ".four requires at least 2 harmonics");
    for (; i < tok.size(); ++i) d.signals.push_back(tok[i]);
    if (d.signals.empty()) throw NetlistError(rec.line, ".four needs at least one signal");
    return d;
}

}  // namespace

namespace {

// The tokenizer splits "V(out)" into "V" and "out"; .four re-joins them.
RawLine rejoin_signal_tokens(const RawLine& rec) {
    RawLine out = rec;
    const std::string head = to_lower(rec.tokens.front());
    if (head != ".four") return out;
    out.tokens.clear();
    static const std::set<std::string> kAccessors{"v", "i", "ic", "ib", "ie", "x", "p"};
    for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
        const std::string lower = to_lower(rec.tokens[i]);
        if (i >= 2 && kAccessors.contains(lower) && i + 1 < rec.tokens.size()) {
            out.tokens.push_back(rec.tokens[i] + "(" + rec.tokens[i + 1] + ")");
            ++i;
        } else {
            out.tokens.push_back(rec.tokens[i]);
        }
    }
    return out;
}

}  // namespace

Circuit elaborate(const RawNetlist& raw) {
    Circuit c;
    c.title = raw.title;

    // Pass 1: model cards and directives.
    std::vector<int> directive_lines;
    for (const auto& rec : raw.lines) {
        if (rec.kind != RawLine::Kind::Directive) continue;
        if (to_lower(rec.tokens.front()) == ".model") {
            ModelCard card = parse_model(rec);
            const std::string key = to_lower(card.name);
            if (c.models.contains(key)) throw NetlistError(rec.line, "duplicate model '" + card.name + "'");
            c.models.emplace(key, std::move(card));
        } else {
            c.directives.push_back(parse_directive(rejoin_signal_tokens(rec)));
            directive_lines.push_back(rec.line);
        }
    }

    // Pass 2: elements, with node names still as strings.
    struct Pending {
        Component comp;
        std::vector<std::string> node_names;
    };
    std::vector<Pending> pending;
    std::set<std::string> seen_names;

    for (const auto& rec : raw.lines) {
        if (rec.kind != RawLine::Kind::Element) continue;
        const auto& tok = rec.tokens;
        const std::string lname = to_lower(tok[0]);
        if (!seen_names.insert(lname).second) {
            throw NetlistError(rec.line, "duplicate component name '" + tok[0] + "'");
        }
        Pending p;
        p.comp.name = tok[0];
        p.comp.line = rec.line;
        const char letter = lname.front();
        const std::size_t nnodes = letter == 'q' ? 3 : 2;
        if (tok.size() < nnodes + 2) {
            throw NetlistError(rec.line, "too few fields for '" + tok[0] + "'");
        }
        for (std::size_t i = 1; i <= nnodes; ++i) p.node_names.push_back(tok[i]);
        const std::vector<std::string> args(tok.begin() + static_cast<long>(nnodes) + 1, tok.end());

        auto resolve_model = [&](const std::string& name) -> const ModelCard& {
            auto it = c.models.find(to_lower(name));
            if (it == c.models.end()) {
                throw NetlistError(rec.line, "unresolved model '" + name + "' for '" + tok[0] + "'");
            }
            return it->second;
        };

        switch (letter) {
            case 'r': {
                if (args.size() != 1) throw NetlistError(rec.line, "resistor expects one value");
                const double r = parse_value(args[0], rec.line);
                if (!(r > 0)) throw NetlistError(rec.line, "resistance must be positive");
                p.comp.data = Resistor{r};
                break;
            }
            case 'v':
            case 'i': {
                std::optional<double> dc;
                std::optional<SineWave> sine;
                for (std::size_t i = 0; i < args.size(); ++i) {
                    const std::string a = to_lower(args[i]);
                    if (a == "dc") {
                        if (i + 1 >= args.size()) throw NetlistError(rec.line, "DC needs a value");
                        dc = parse_value(args[++i], rec.line);
                    } else if (a == "sin") {
                        if (letter == 'i') throw NetlistError(rec.line, "SIN is only supported on voltage sources");
                        if (i + 3 >= args.size()) throw NetlistError(rec.line, "SIN expects (voff vamp freq)");
                        SineWave s{parse_value(args[i + 1], rec.line), parse_value(args[i + 2], rec.line),
                                   parse_value(args[i + 3], rec.line)};
                        if (!(s.freq > 0)) throw NetlistError(rec.line, "SIN frequency must be positive");
                        sine = s;
                        i += 3;
                    } else if (!dc) {
                        dc = parse_value(args[i], rec.line);
                    } else {
                        throw NetlistError(rec.line, "unexpected source field '" + args[i] + "'");
                    }
                }
                if (!dc && !sine) throw NetlistError(rec.line, "source '" + tok[0] + "' has no value");
                const double dc_value = dc ? *dc : sine->offset;
                if (letter == 'v') p.comp.data = VoltageSource{dc_value, sine};
                else p.comp.data = CurrentSource{dc_value};
                break;
            }
            case 'q': {
                if (args.size() != 1) throw NetlistError(rec.line, "BJT expects: c b e model");
                const ModelCard& card = resolve_model(args[0]);
                if (!std::holds_alternative<BjtModel>(card.params)) {
                    throw NetlistError(rec.line, "model '" + card.name + "' is not an NPN model");
                }
                p.comp.data = Bjt{card.name, std::get<BjtModel>(card.params)};
                break;
            }
            case 'm': {
                if (args.empty()) throw NetlistError(rec.line, "memristor expects: n+ n- model [xinit=val]");
                const ModelCard& card = resolve_model(args[0]);
                if (!std::holds_alternative<MemristorModel>(card.params)) {
                    throw NetlistError(rec.line, "model '" + card.name + "' is not a MEMR model");
                }
                MemristorModel m = std::get<MemristorModel>(card.params);
                for (std::size_t i = 1; i < args.size(); ++i) {
                    auto kv = split_key_value(args[i]);
                    if (!kv || kv->key != "xinit") {
                        throw NetlistError(rec.line, "unexpected memristor field '" + args[i] + "'");
                    }
                    m.x_init = parse_value(kv->value, rec.line);
                    if (!(m.x_init >= 0 && m.x_init <= 1)) throw NetlistError(rec.line, "xinit must lie in [0, 1]");
                }
                p.comp.data = Memristor{card.name, m};
                break;
            }
        }
        pending.push_back(std::move(p));
    }

    // Node interning: ground first, the rest in sorted order so that the
    // numbering does not depend on component line order.
    std::map<std::string, std::string> spelled;  // lower -> first spelling
    std::unordered_map<std::string, int> uses;
    std::unordered_map<std::string, int> first_line;
    for (const auto& p : pending) {
        for (const auto& n : p.node_names) {
            const std::string key = to_lower(n);
            spelled.emplace(key, n);
            ++uses[key];
            first_line.emplace(key, p.comp.line);
        }
    }
    if (!spelled.contains("0")) throw NetlistError(0, "no ground node (node \"0\")");

    std::unordered_map<std::string, NodeIndex> index;
    c.node_names.push_back("0");
    index["0"] = kGround;
    for (const auto& [key, name] : spelled) {
        if (key == "0") continue;
        if (uses[key] < 2) {
            throw NetlistError(first_line[key], "dangling node '" + name + "' is connected to only one terminal");
        }
        index[key] = c.node_names.size();
        c.node_names.push_back(name);
    }

    for (auto& p : pending) {
        for (const auto& n : p.node_names) p.comp.nodes.push_back(index.at(to_lower(n)));
        c.components.push_back(std::move(p.comp));
    }

    // Directive cross-checks.
    for (std::size_t i = 0; i < c.directives.size(); ++i) {
        if (const auto* dc = std::get_if<DcSweepDirective>(&c.directives[i])) {
            const Component* src = c.find_component(dc->source);
            if (!src || !(src->is<VoltageSource>() || src->is<CurrentSource>())) {
                throw NetlistError(directive_lines[i], ".dc sweep source '" + dc->source + "' is not an independent source");
            }
        }
    }
    return c;
}

Circuit load_circuit(std::string_view text) { return elaborate(parse_netlist(text)); }

std::optional<NodeIndex> Circuit::find_node(std::string_view name) const {
    const std::string key = to_lower(name);
    for (std::size_t i = 0; i < node_names.size(); ++i) {
        if (to_lower(node_names[i]) == key) return i;
    }
    return std::nullopt;
}

const Component* Circuit::find_component(std::string_view name) const {
    const std::string key = to_lower(name);
    for (const auto& comp : components) {
        if (to_lower(comp.name) == key) return &comp;
    }
    return nullptr;
}

std::size_t Circuit::voltage_source_count() const {
    return static_cast<std::size_t>(
        std::count_if(components.begin(), components.end(), [](const Component& k) { return k.is<VoltageSource>(); }));
}

std::size_t Circuit::memristor_count() const {
    return static_cast<std::size_t>(
        std::count_if(components.begin(), components.end(), [](const Component& k) { return k.is<Memristor>(); }));
}

bool Circuit::operator==(const Circuit& o) const {
    auto sorted = [](const std::vector<Component>& v) {
        std::vector<const Component*> out;
        for (const auto& k : v) out.push_back(&k);
        std::sort(out.begin(), out.end(),
                  [](const Component* a, const Component* b) { return to_lower(a->name) < to_lower(b->name); });
        return out;
    };
    if (components.size() != o.components.size()) return false;
    const auto a = sorted(components);
    const auto b = sorted(o.components);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(*a[i] == *b[i])) return false;
    }
    if (models.size() != o.models.size()) return false;
    for (const auto& [key, card] : models) {
        auto it = o.models.find(key);
        if (it == o.models.end() || it->second.params != card.params) return false;
    }
    if (node_names.size() != o.node_names.size()) return false;
    for (std::size_t i = 0; i < node_names.size(); ++i) {
        if (to_lower(node_names[i]) != to_lower(o.node_names[i])) return false;
    }
    return directives == o.directives;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

namespace {

void print_bjt_card(std::ostream& os, const std::string& name, const BjtModel& m) {
    os << ".model " << name << " NPN(IS=" << format_double(m.is_sat) << " BF=" << format_double(m.bf)
       << " BR=" << format_double(m.br);
    if (std::isfinite(m.vaf)) os << " VAF=" << format_double(m.vaf);
    os << ")\n";
}

void print_memr_card(std::ostream& os, const std::string& name, const MemristorModel& m) {
    os << ".model " << name << " MEMR(RON=" << format_double(m.r_on) << " ROFF=" << format_double(m.r_off)
       << " D=" << format_double(m.d) << " UV=" << format_double(m.mu_v) << " P=" << m.p
       << " XINIT=" << format_double(m.x_init);
    if (!m.window) os << " WINDOW=0";
    os << ")\n";
}

}  // namespace

std::string to_netlist(const Circuit& circuit) {
    std::ostringstream os;
    os << (circuit.title.empty() ? std::string("untitled") : circuit.title) << "\n";
    for (const auto& [key, card] : circuit.models) {
        std::visit(
            [&](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, BjtModel>) print_bjt_card(os, card.name, m);
                else print_memr_card(os, card.name, m);
            },
            card.params);
    }
    for (const auto& comp : circuit.components) {
        os << comp.name;
        for (auto n : comp.nodes) os << ' ' << circuit.node_names[n];
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Resistor>) {
                    os << ' ' << format_double(d.resistance);
                } else if constexpr (std::is_same_v<T, VoltageSource>) {
                    os << " DC " << format_double(d.dc);
                    if (d.sine) {
                        os << " SIN(" << format_double(d.sine->offset) << ' ' << format_double(d.sine->amplitude)
                           << ' ' << format_double(d.sine->freq) << ')';
                    }
                } else if constexpr (std::is_same_v<T, CurrentSource>) {
                    os << " DC " << format_double(d.dc);
                } else if constexpr (std::is_same_v<T, Bjt>) {
                    os << ' ' << d.model;
                } else {
                    os << ' ' << d.model << " xinit=" << format_double(d.params.x_init);
                }
            },
            comp.data);
        os << "\n";
    }
    for (const auto& dir : circuit.directives) {
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, OpDirective>) {
                    os << ".op";
                } else if constexpr (std::is_same_v<T, DcSweepDirective>) {
                    os << ".dc " << d.source << ' ' << format_double(d.start) << ' ' << format_double(d.stop) << ' '
                       << format_double(d.step);
                } else if constexpr (std::is_same_v<T, TranDirective>) {
                    os << ".tran " << format_double(d.tstep) << ' ' << format_double(d.tstop) << ' '
                       << format_double(d.tstart);
                } else {
                    os << ".four " << format_double(d.fundamental) << ' ' << d.nharmonics;
                    for (const auto& s : d.signals) os << ' ' << s;
                }
            },
            dir);
        os << "\n";
    }
    os << ".end\n";
    return os.str();
}

}  // namespace mirrorsim
