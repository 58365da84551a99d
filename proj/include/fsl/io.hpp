#ifndef FSL_IO_HPP
#define FSL_IO_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "fsl/apps.hpp"
#include "fsl/equivalence.hpp"
#include "fsl/space.hpp"
#include "fsl/weights.hpp"

namespace fsl {

using Json = nlohmann::json;

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// {"type":"grid","dim":1,"side":64,"spacing":...,"boundary":"periodic"}
/// {"type":"graph","n":N,"edges":[[i,j,len],...],"measure":[...]}
MetricMeasureSpace space_from_config(const Json& cfg);

/// {"type":"constant"} | {"type":"power","center":i,"exponent":a}
/// | {"type":"explicit","values":[...]}
Weight weight_from_config(const MetricMeasureSpace& s, const Json& cfg);

/// {"kind":"grid-laplacian"|"graph-laplacian","normalization":"unit-speed"|"none"}
SelfAdjointOperator operator_from_config(const MetricMeasureSpace& s, const Json& cfg);

/// {"type":"partition","shape":1} | {"type":"heat","m":2} | {"type":"sm","m":1}
/// | {"type":"compact-phi","half_width":0.25}
SpectralProfile profile_from_config(const Json& cfg);

/// {"type":"constant","value":1} | {"type":"exp","a":0.5}
/// | {"type":"table","u":[...],"m":[...]}
MultiplierProfile symbol_from_config(const Json& cfg);

Json cube_tree_to_json(const DyadicCubeTree& tree);
Json report_to_json(const EquivalenceReport& rep);

/// One CSV value column set per report line; bit-stable for a fixed report.
std::string report_to_csv(const Json& report_file);

Vec read_csv_vector(const std::string& path);
void write_csv_vector(const std::string& path, const Vec& v);

/// Recorded empirical bands keyed by check/parameter strings. Append-only:
/// record() refuses to change an existing entry unless rebaseline is set.
class BaselineStore {
public:
    BaselineStore() = default;
    static BaselineStore load(const std::string& path);
    void save(const std::string& path) const;

    struct Entry {
        double lo = 0.0;
        double hi = 0.0;
        double median = 0.0;
        std::string date;
        std::string config_hash;
    };

    std::optional<Entry> find(const std::string& key) const;
    /// Returns false when the key exists and rebaseline was not requested.
    bool record(const std::string& key, const Entry& e, bool rebaseline);
    /// Drift-tolerant containment: [lo, hi] within baseline widened by the factor.
    bool within(const std::string& key, double lo, double hi, double drift = 1.10) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    std::map<std::string, Entry> entries_;
};

std::string config_hash(const Json& j);

} // namespace fsl

#endif
