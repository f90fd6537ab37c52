#ifndef STRATAFILL_SERIALIZE_HPP
#define STRATAFILL_SERIALIZE_HPP

#include <json.hpp>
#include <string>

#include "stratafill/detour.hpp"
#include "stratafill/nerve.hpp"
#include "stratafill/pipeline.hpp"

namespace stratafill {

/// Ordered JSON keeps key order deterministic, which the byte-identical
/// reproducibility criterion relies on.
using Json = nlohmann::ordered_json;

/// Coordinates serialize as %.17g strings: lossless for doubles and byte
/// deterministic across runs.
std::string format_coord(double v);

/// Point table: a compact remapping of the referenced store points.
class PointTable {
  public:
    PointTable() = default;

    /// Collect every id referenced by the registered objects.
    void add(PointId p);
    void add_chain(const DiscreteChain& c);
    std::uint32_t index_of(PointId p) const;

    Json to_json(const PointStore& store) const;

    /// Load into a store; returns serialized-index -> new PointId.
    static std::vector<PointId> load(const Json& j, PointStore& store);

  private:
    std::map<PointId, std::uint32_t> index_;
    std::vector<PointId> order_;
};

Json chain_to_json(const DiscreteChain& c, const PointTable& table);
DiscreteChain chain_from_json(const Json& j, const std::vector<PointId>& remap);

Json family_to_json(const BallFamily& f, const PointStore& store);
BallFamily family_from_json(const Json& j, PointStore& store);

Json separation_report_to_json(const SeparationReport& rep);
Json detour_report_to_json(const DetourReport& rep, const PointStore& store);
Json homology_to_json(const HomologyGroups& h);
Json matrix_to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const Json& j);
Json da_report_to_json(const DACheckReport& rep, const PointStore& store);

/// Cover serialization: ball descriptors with net references; staged and
/// explicit sets serialize their member lists.
Json cover_to_json(const Cover& cover, const PointTable& table);

/// Self-contained non-vanishing certificate: puncture coordinates, the convex
/// cover, representative cycles and the class matrix.
Json nonvanish_to_json(const NonvanishCertificate& cert, const BallFamily& family,
                       const Cover& u_cover, const PointStore& store);

struct NonvanishReverify {
    std::size_t rank = 0;
    std::size_t stored_rank = 0;
    bool ok = false;
    std::vector<std::string> notes;
};

/// Recompute the certificate's rank from serialized data alone (fresh store,
/// covers rebuilt from descriptors, classes re-derived through a parent map).
NonvanishReverify reverify_nonvanish(const Json& j);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace stratafill

#endif
