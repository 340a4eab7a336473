#include "ecmpower/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ecmpower {

ParseError::ParseError(const std::string& file, int line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
      file_(file),
      line_(line) {}

namespace {

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    std::vector<KeyValue> entries;
    int line = 0;
};

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<Section> read_sections(std::istream& in, const std::string& path) {
    std::vector<Section> sections;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto text = trim(line);
        if (text.empty() || text.front() == '#')
            continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ParseError(path, lineno, "unterminated section header");
            sections.push_back({trim(text.substr(1, text.size() - 2)), {}, lineno});
            continue;
        }
        auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ParseError(path, lineno, "expected 'key = value'");
        if (sections.empty())
            throw ParseError(path, lineno, "key outside of any section");
        sections.back().entries.push_back(
            {trim(text.substr(0, eq)), trim(text.substr(eq + 1)), lineno});
    }
    return sections;
}

double parse_double(const KeyValue& kv, const std::string& path) {
    try {
        std::size_t pos = 0;
        double v = std::stod(kv.value, &pos);
        if (pos != kv.value.size())
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path, kv.line, "invalid number for key '" + kv.key + "'");
    }
}

int parse_int(const KeyValue& kv, const std::string& path) {
    double v = parse_double(kv, path);
    if (v != std::floor(v))
        throw ParseError(path, kv.line, "expected an integer for key '" + kv.key + "'");
    return static_cast<int>(v);
}

bool parse_bool(const KeyValue& kv, const std::string& path) {
    if (kv.value == "true")
        return true;
    if (kv.value == "false")
        return false;
    throw ParseError(path, kv.line, "expected true/false for key '" + kv.key + "'");
}

// "1.6:30.6 2.7:32.3" -> frequency/bandwidth step table.
BandwidthTable parse_table(const KeyValue& kv, const std::string& path) {
    BandwidthTable table;
    std::istringstream ss(kv.value);
    std::string pair;
    while (ss >> pair) {
        auto colon = pair.find(':');
        if (colon == std::string::npos)
            throw ParseError(path, kv.line, "expected GHz:GBs pairs for '" + kv.key + "'");
        try {
            table.insert(std::stod(pair.substr(0, colon)), std::stod(pair.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ParseError(path, kv.line, "invalid number in '" + kv.key + "'");
        }
    }
    if (table.empty())
        throw ParseError(path, kv.line, "empty table for '" + kv.key + "'");
    return table;
}

[[noreturn]] void unknown_key(const KeyValue& kv, const std::string& path) {
    throw ParseError(path, kv.line, "unknown key '" + kv.key + "'");
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path, 0, "cannot open file");
    return in;
}

std::string format_number(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

}  // namespace

MachineDescription parse_machine(std::istream& in, const std::string& path) {
    MachineDescription m;
    bool saw_machine = false;
    for (const auto& section : read_sections(in, path)) {
        if (section.name == "machine") {
            saw_machine = true;
            for (const auto& kv : section.entries) {
                if (kv.key == "name")
                    m.name = kv.value;
                else if (kv.key == "cores")
                    m.cores = parse_int(kv, path);
                else if (kv.key == "base_frequency_ghz")
                    m.base_frequency_ghz = parse_double(kv, path);
                else if (kv.key == "frequency_range_ghz") {
                    std::istringstream ss(kv.value);
                    if (!(ss >> m.min_frequency_ghz >> m.max_frequency_ghz))
                        throw ParseError(path, kv.line, "expected two numbers for frequency_range_ghz");
                } else if (kv.key == "memory_bandwidth_gbs")
                    m.memory_bandwidth_gbs = parse_double(kv, path);
                else if (kv.key == "memory_bandwidth_table")
                    m.bandwidth_table = parse_table(kv, path);
                else if (kv.key == "flops_per_cycle_per_core")
                    m.flops_per_cycle_per_core = parse_double(kv, path);
                else if (kv.key == "load_width_bytes_per_cycle")
                    m.load_width_bytes_per_cycle = parse_double(kv, path);
                else if (kv.key == "store_width_bytes_per_cycle")
                    m.store_width_bytes_per_cycle = parse_double(kv, path);
                else
                    unknown_key(kv, path);
            }
        } else if (section.name == "cache") {
            CacheLevel level;
            for (const auto& kv : section.entries) {
                if (kv.key == "name")
                    level.name = kv.value;
                else if (kv.key == "line_size_bytes")
                    level.line_size_bytes = parse_double(kv, path);
                else if (kv.key == "bus_width_bytes_per_cycle")
                    level.bus_width_bytes_per_cycle = parse_double(kv, path);
                else if (kv.key == "duplex") {
                    if (kv.value == "half")
                        level.duplex = Duplex::half;
                    else if (kv.value == "full")
                        level.duplex = Duplex::full;
                    else
                        throw ParseError(path, kv.line, "duplex must be half or full");
                } else if (kv.key == "single_ported")
                    level.single_ported = parse_bool(kv, path);
                else
                    unknown_key(kv, path);
            }
            m.cache_levels.push_back(level);
        } else {
            throw ParseError(path, section.line, "unknown section '" + section.name + "'");
        }
    }
    if (!saw_machine)
        throw ParseError(path, 0, "missing [machine] section");
    if (auto violations = validate_machine(m); !violations.empty())
        throw ParseError(path, 0, "invalid machine: " + violations.front());
    return m;
}

MachineDescription load_machine(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_machine(in, path);
}

KernelDescription parse_kernel(std::istream& in, const std::string& path) {
    KernelDescription k;
    bool saw_kernel = false;
    for (const auto& section : read_sections(in, path)) {
        if (section.name == "kernel") {
            saw_kernel = true;
            for (const auto& kv : section.entries) {
                if (kv.key == "name")
                    k.name = kv.value;
                else if (kv.key == "unit_of_work")
                    k.unit_of_work = parse_int(kv, path);
                else if (kv.key == "flops_per_iteration")
                    k.flops_per_iteration = parse_double(kv, path);
                else if (kv.key == "core_cycles") {
                    if (kv.value == "counted") {
                        k.core_cycles.counted = true;
                    } else {
                        std::istringstream ss(kv.value);
                        std::string word;
                        double cycles = 0.0;
                        if (!(ss >> word >> cycles) || word != "supplied")
                            throw ParseError(path, kv.line,
                                             "core_cycles must be 'counted' or 'supplied <cycles>'");
                        k.core_cycles.counted = false;
                        k.core_cycles.supplied_cycles = cycles;
                    }
                } else if (kv.key == "core_cycles_provenance")
                    k.core_cycles.provenance = kv.value;
                else if (kv.key == "core_overlappable")
                    k.core_overlappable = parse_bool(kv, path);
                else if (kv.key == "memory_bandwidth_gbs")
                    k.memory_bandwidth_override_gbs = parse_double(kv, path);
                else if (kv.key == "memory_bandwidth_table")
                    k.memory_bandwidth_override_table = parse_table(kv, path);
                else if (kv.key == "work_metric")
                    k.work_metric.label = kv.value;
                else if (kv.key == "iterations_per_work_item")
                    k.work_metric.iterations_per_work_item = parse_double(kv, path);
                else if (kv.key == "comment")
                    k.comment = kv.value;
                else
                    unknown_key(kv, path);
            }
        } else if (section.name == "stream") {
            StreamSpec s;
            for (const auto& kv : section.entries) {
                if (kv.key == "name")
                    s.name = kv.value;
                else if (kv.key == "kind") {
                    if (kv.value == "load")
                        s.kind = StreamKind::load;
                    else if (kv.value == "store")
                        s.kind = StreamKind::store;
                    else if (kv.value == "update")
                        s.kind = StreamKind::update;
                    else
                        throw ParseError(path, kv.line, "kind must be load, store, or update");
                } else if (kv.key == "count")
                    s.count = parse_int(kv, path);
                else if (kv.key == "bytes_per_iteration")
                    s.bytes_per_iteration = parse_double(kv, path);
                else if (kv.key == "nontemporal")
                    s.nontemporal = parse_bool(kv, path);
                else
                    unknown_key(kv, path);
            }
            k.streams.push_back(s);
        } else {
            throw ParseError(path, section.line, "unknown section '" + section.name + "'");
        }
    }
    if (!saw_kernel)
        throw ParseError(path, 0, "missing [kernel] section");
    return k;
}

KernelDescription load_kernel(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_kernel(in, path);
}

PowerParameters parse_power_parameters(std::istream& in, const std::string& path) {
    PowerParameters p;
    bool saw_section = false;
    bool saw_w0 = false, saw_w2 = false;
    for (const auto& section : read_sections(in, path)) {
        if (section.name != "power")
            throw ParseError(path, section.line, "unknown section '" + section.name + "'");
        saw_section = true;
        for (const auto& kv : section.entries) {
            if (kv.key == "w0_watts") {
                p.w0_watts = parse_double(kv, path);
                saw_w0 = true;
            } else if (kv.key == "w1_watts_per_ghz_per_core")
                p.w1_watts_per_ghz = parse_double(kv, path);
            else if (kv.key == "w2_watts_per_ghz2_per_core") {
                p.w2_watts_per_ghz2 = parse_double(kv, path);
                saw_w2 = true;
            } else
                unknown_key(kv, path);
        }
    }
    if (!saw_section || !saw_w0 || !saw_w2)
        throw ParseError(path, 0, "missing [power] section with w0_watts and w2_watts_per_ghz2_per_core");
    return p;
}

PowerParameters load_power_parameters(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_power_parameters(in, path);
}

std::string format_power_parameters(const PowerParameters& params) {
    std::ostringstream out;
    out << "[power]\n";
    out << "w0_watts = " << format_number(params.w0_watts) << "\n";
    out << "w1_watts_per_ghz_per_core = " << format_number(params.w1_watts_per_ghz) << "\n";
    out << "w2_watts_per_ghz2_per_core = " << format_number(params.w2_watts_per_ghz2) << "\n";
    return out.str();
}

MeasurementSeries parse_measurements(std::istream& in, const std::string& path) {
    MeasurementSeries series;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    bool has_performance = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto text = trim(line);
        if (text.empty() || text.front() == '#')
            continue;
        std::vector<std::string> fields;
        std::istringstream ss(text);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(trim(field));
        if (!saw_header) {
            if (fields.size() < 3 || fields[0] != "frequency_ghz" || fields[1] != "cores" ||
                fields[2] != "power_w")
                throw ParseError(path, lineno,
                                 "header must be frequency_ghz,cores,power_w[,performance]");
            if (fields.size() == 4 && fields[3] == "performance")
                has_performance = true;
            else if (fields.size() > 3)
                throw ParseError(path, lineno, "unexpected extra header column");
            saw_header = true;
            continue;
        }
        std::size_t expected = has_performance ? 4 : 3;
        if (fields.size() != expected && !(has_performance && fields.size() == 3))
            throw ParseError(path, lineno, "wrong number of columns");
        MeasurementPoint p;
        try {
            p.frequency_ghz = std::stod(fields[0]);
            p.cores = std::stoi(fields[1]);
            p.power_watts = std::stod(fields[2]);
            if (has_performance && fields.size() == 4 && !fields[3].empty())
                p.performance = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "invalid numeric field");
        }
        if (p.power_watts <= 0.0)
            throw ParseError(path, lineno, "power must be positive");
        series.points.push_back(p);
    }
    if (!saw_header)
        throw ParseError(path, 0, "empty measurement file");
    return series;
}

MeasurementSeries load_measurements(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_measurements(in, path);
}

std::string ecm_timeline_csv(const EcmPrediction& prediction) {
    std::ostringstream out;
    out << "contribution,cycles,start_no_overlap,start_single_ported,start_full\n";
    for (std::size_t i = 0; i < prediction.contributions.size(); ++i) {
        const auto& c = prediction.contributions[i];
        out << c.label << ',' << format_number(c.cycles) << ','
            << format_number(prediction.starts_no_overlap[i]) << ','
            << format_number(prediction.starts_single_ported[i]) << ','
            << format_number(prediction.starts_full[i]) << '\n';
    }
    return out.str();
}

std::string scaling_csv(const std::vector<std::pair<int, double>>& curve,
                        double roofline_bound) {
    std::ostringstream out;
    out << "cores,predicted_rate,roofline_bound\n";
    for (const auto& [t, p] : curve) {
        out << t << ',' << format_number(p) << ',';
        if (std::isfinite(roofline_bound))
            out << format_number(roofline_bound);
        out << '\n';
    }
    return out.str();
}

std::string energy_surface_csv(const EnergyAnalysis& analysis) {
    std::ostringstream out;
    out << "f_GHz,t,W_watts,P_rate,E_joules,C_joule_seconds\n";
    for (const auto& p : analysis.surface) {
        out << format_number(p.frequency_ghz) << ',' << p.cores << ','
            << format_number(p.power_watts) << ',' << format_number(p.performance) << ','
            << format_number(p.energy_joules) << ',' << format_number(p.cost_joule_seconds)
            << '\n';
    }
    return out.str();
}

}  // namespace ecmpower
