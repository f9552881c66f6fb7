#pragma once

#include <string>

#include "projmod/connection.hpp"

// single-header vendored nlohmann/json
#include "json.hpp"

namespace projmod {

using Json = nlohmann::json;

Json to_json(const BackendConfig& cfg);
BackendPtr backend_from_json(const Json& j);

/// {"backend": ..., "coeffs":[{"k":[...],"re":..,"im":..},...]} for torus
/// kinds; {"backend": ..., "entries":[[{"re":..,"im":..},...],...]} dense.
Json to_json(const AlgebraElement& a);
AlgebraElement element_from_json(const Json& j);

/// {"n": n, "entries": [[<element>,...],...]}.
Json to_json(const MatrixElement& x);
MatrixElement matrix_from_json(const Json& j);

/// Matrix format plus {"residual": r}.
Json to_json(const Idempotent& p);
Idempotent idempotent_from_json(const Json& j);

/// {"n": n, "p": <matrix>, "backend": ...}.
Json module_to_json(const ProjectiveModule& E);
ModulePtr module_from_json(const Json& j);

/// {"v": [<element>,...]}.
Json to_json(const ModuleVector& s);
ModuleVector vector_from_json(const ModulePtr& E, const Json& j);

/// {"module": ..., "alpha": {"D1": <matrix>, ...}} over the standard
/// torus basis.
Json connection_to_json(const Connection& c);
Connection connection_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace projmod
