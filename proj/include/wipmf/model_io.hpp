#pragma once

#include "wipmf/bandit.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>

namespace wipmf {

struct ModelFile {
    std::variant<BanditModel, AsyncBanditModel> model;
    std::optional<double> alpha;
    bool is_async() const { return model.index() == 1; }
};

ModelFile parse_model(const nlohmann::json& j);
ModelFile load_model(const std::string& path);
nlohmann::json to_json(const BanditModel& m, std::optional<double> alpha = {});
nlohmann::json to_json(const AsyncBanditModel& m, std::optional<double> alpha = {});

nlohmann::json matrix_json(const Matrix& A);
nlohmann::json vector_json(const Vector& v);

} // namespace wipmf
