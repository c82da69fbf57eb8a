#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eftcot/core/types.hpp"
#include "eftcot/gateway/types.hpp"

namespace eftcot::gateway {

/// Category -> endpoint mapping over a registry of endpoints.
class RoutingTable {
public:
    RoutingTable() = default;
    RoutingTable(std::vector<ModelEndpoint> endpoints, std::map<TopicCategory, std::string> routes,
                 std::optional<std::string> default_endpoint = std::nullopt);

    /// Problems that make the table unusable; empty when valid.
    std::vector<std::string> problems() const;

    const ModelEndpoint& endpoint(std::string_view id) const;
    bool has_endpoint(std::string_view id) const;
    const std::vector<ModelEndpoint>& endpoints() const { return endpoints_; }
    const std::map<TopicCategory, std::string>& routes() const { return routes_; }
    const std::optional<std::string>& default_endpoint() const { return default_; }

private:
    std::vector<ModelEndpoint> endpoints_;
    std::map<TopicCategory, std::string> routes_;
    std::optional<std::string> default_;
};

/// Mapped endpoint for the category, else the default. Throws RouteError.
const ModelEndpoint& resolve_route(const RoutingTable& table, TopicCategory category);

/// The four-provider heterogeneous preset: youth topics, high-context
/// affective topics, interaction topics and therapy each get their own model.
RoutingTable heterogeneous_preset();

} // namespace eftcot::gateway
