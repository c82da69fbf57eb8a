#include "eftcot/gateway/routing.hpp"

#include <set>

namespace eftcot::gateway {

RoutingTable::RoutingTable(std::vector<ModelEndpoint> endpoints, std::map<TopicCategory, std::string> routes,
                           std::optional<std::string> default_endpoint)
    : endpoints_(std::move(endpoints)), routes_(std::move(routes)), default_(std::move(default_endpoint)) {}

std::vector<std::string> RoutingTable::problems() const {
    std::vector<std::string> out;
    std::set<std::string> ids;
    for (const auto& ep : endpoints_) {
        if (ep.id.empty()) out.push_back("endpoint with empty id");
        if (!ids.insert(ep.id).second) out.push_back("duplicate endpoint id '" + ep.id + "'");
    }
    for (const auto& [category, id] : routes_) {
        if (!ids.contains(id)) {
            out.push_back("routing for " + std::string(to_string(category)) + " references unknown endpoint '" + id + "'");
        }
    }
    if (default_ && !ids.contains(*default_)) {
        out.push_back("default route references unknown endpoint '" + *default_ + "'");
    }
    if (!default_ && routes_.size() < kAllCategories.size()) {
        for (TopicCategory c : kAllCategories) {
            if (!routes_.contains(c)) out.push_back("category " + std::string(to_string(c)) + " is unmapped and no default endpoint is set");
        }
    }
    return out;
}

const ModelEndpoint& RoutingTable::endpoint(std::string_view id) const {
    for (const auto& ep : endpoints_) {
        if (ep.id == id) return ep;
    }
    throw RouteError("unknown endpoint '" + std::string(id) + "'");
}

bool RoutingTable::has_endpoint(std::string_view id) const {
    for (const auto& ep : endpoints_) {
        if (ep.id == id) return true;
    }
    return false;
}

const ModelEndpoint& resolve_route(const RoutingTable& table, TopicCategory category) {
    auto it = table.routes().find(category);
    if (it != table.routes().end()) return table.endpoint(it->second);
    if (table.default_endpoint()) return table.endpoint(*table.default_endpoint());
    throw RouteError("no route for category " + std::string(to_string(category)) + " and no default endpoint");
}

RoutingTable heterogeneous_preset() {
    auto make = [](std::string id, std::string url, std::string model, std::string env) {
        ModelEndpoint ep;
        ep.id = std::move(id);
        ep.base_url = std::move(url);
        ep.model_name = std::move(model);
        ep.auth_env_var = std::move(env);
        return ep;
    };
    std::vector<ModelEndpoint> endpoints = {
        make("doubao-1.5-pro", "https://ark.cn-beijing.volces.com/api/v3", "doubao-1.5-pro-32k", "ARK_API_KEY"),
        make("qwen-max", "https://dashscope.aliyuncs.com/compatible-mode/v1", "qwen-max", "DASHSCOPE_API_KEY"),
        make("deepseek-chat", "https://api.deepseek.com/v1", "deepseek-chat", "DEEPSEEK_API_KEY"),
        make("gpt-4o", "https://api.openai.com/v1", "gpt-4o", "OPENAI_API_KEY"),
    };
    std::map<TopicCategory, std::string> routes = {
        {TopicCategory::Growth, "doubao-1.5-pro"},      {TopicCategory::Romance, "doubao-1.5-pro"},
        {TopicCategory::Career, "doubao-1.5-pro"},      {TopicCategory::Marriage, "qwen-max"},
        {TopicCategory::Family, "qwen-max"},            {TopicCategory::Emotion, "qwen-max"},
        {TopicCategory::Behavior, "deepseek-chat"},     {TopicCategory::Interpersonal, "deepseek-chat"},
        {TopicCategory::Therapy, "gpt-4o"},
    };
    return RoutingTable(std::move(endpoints), std::move(routes));
}

} // namespace eftcot::gateway
