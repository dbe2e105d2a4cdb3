#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mirrorsim {

/// Error raised while reading or elaborating a netlist. Carries the 1-based
/// source line (0 when the problem is not tied to a single line).
class NetlistError : public std::runtime_error {
public:
    NetlistError(int line, const std::string& message)
        : std::runtime_error(message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Parses a SPICE-style number such as "9.3k", "2meg", "10u" or "10kOhm".
/// Letters trailing a valid suffix (or the digits) are ignored.
double parse_value(std::string_view token, int line = 0);

/// Lower-cases ASCII; all names and keywords in the dialect are case-insensitive.
std::string to_lower(std::string_view s);

// ---------------------------------------------------------------------------
// Raw syntax
// ---------------------------------------------------------------------------

struct RawLine {
    enum class Kind { Element, Directive };
    Kind kind;
    int line;                     // line of the first physical line
    std::vector<std::string> tokens;
};

struct RawNetlist {
    std::string title;
    std::vector<RawLine> lines;
};

/// Splits text into title plus element/directive records. Drops comments and
/// blank lines, joins `+` continuations and stops at `.end`.
RawNetlist parse_netlist(std::string_view text);

// ---------------------------------------------------------------------------
// Elaborated circuit
// ---------------------------------------------------------------------------

using NodeIndex = std::size_t;
inline constexpr NodeIndex kGround = 0;

struct BjtModel {
    double is_sat = 1e-14;
    double bf = 100.0;
    double vaf = std::numeric_limits<double>::infinity();
    double br = 1.0;
    bool operator==(const BjtModel&) const = default;
};

struct MemristorModel {
    double r_on = 100.0;
    double r_off = 16e3;
    double d = 10e-9;
    double mu_v = 1e-14;
    int p = 1;
    double x_init = 0.5;
    /// When false the Joglekar window is replaced by 1 (linear drift model).
    bool window = true;
    bool operator==(const MemristorModel&) const = default;
};

struct ModelCard {
    std::string name;
    std::variant<BjtModel, MemristorModel> params;
    bool operator==(const ModelCard&) const = default;
};

struct SineWave {
    double offset = 0.0;
    double amplitude = 0.0;
    double freq = 0.0;
    bool operator==(const SineWave&) const = default;
};

struct Resistor {
    double resistance;
    bool operator==(const Resistor&) const = default;
};

struct VoltageSource {
    double dc;
    std::optional<SineWave> sine;
    bool operator==(const VoltageSource&) const = default;
};

struct CurrentSource {
    double dc;
    bool operator==(const CurrentSource&) const = default;
};

struct Bjt {
    std::string model;
    BjtModel params;
    bool operator==(const Bjt&) const = default;
};

struct Memristor {
    std::string model;
    MemristorModel params;  // x_init already reflects an instance override
    bool operator==(const Memristor&) const = default;
};

using ComponentData = std::variant<Resistor, VoltageSource, CurrentSource, Bjt, Memristor>;

/// One circuit element. Node order follows the element line: R/V/I/M use
/// (n+, n-), Q uses (collector, base, emitter).
struct Component {
    std::string name;
    std::vector<NodeIndex> nodes;
    ComponentData data;
    int line = 0;

    template <class T> bool is() const { return std::holds_alternative<T>(data); }
    template <class T> const T& as() const { return std::get<T>(data); }

    bool operator==(const Component& o) const {
        return to_lower(name) == to_lower(o.name) && nodes == o.nodes && data == o.data;
    }
};

struct OpDirective {
    bool operator==(const OpDirective&) const = default;
};

struct DcSweepDirective {
    std::string source;
    double start;
    double stop;
    double step;
    bool operator==(const DcSweepDirective&) const = default;
};

struct TranDirective {
    double tstep;
    double tstop;
    double tstart = 0.0;
    bool operator==(const TranDirective&) const = default;
};

struct FourDirective {
    double fundamental;
    int nharmonics = 9;
    std::vector<std::string> signals;
    bool operator==(const FourDirective&) const = default;
};

using Directive = std::variant<OpDirective, DcSweepDirective, TranDirective, FourDirective>;

class Circuit {
public:
    std::string title;
    std::vector<Component> components;
    std::map<std::string, ModelCard> models;  // keyed by lower-case name
    std::vector<Directive> directives;
    /// Node names by index; index 0 is ground ("0").
    std::vector<std::string> node_names;

    std::size_t node_count() const { return node_names.size(); }
    std::optional<NodeIndex> find_node(std::string_view name) const;
    const Component* find_component(std::string_view name) const;
    std::size_t voltage_source_count() const;
    std::size_t memristor_count() const;

    /// Circuits compare by components (in name order), models, directives and
    /// node names; titles and source line numbers are ignored.
    bool operator==(const Circuit& o) const;
};

/// Resolves names, models and defaults and checks the structural invariants.
Circuit elaborate(const RawNetlist& raw);

/// Convenience: parse_netlist followed by elaborate.
Circuit load_circuit(std::string_view text);

/// Prints a circuit back to the netlist dialect; re-parsing yields an equal Circuit.
std::string to_netlist(const Circuit& circuit);

/// Formats a double with the shortest representation that round-trips.
std::string format_double(double v);

}  // namespace mirrorsim
