#include "panm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace panm {

void Scenario::validate() const {
  if (N <= 0 || P <= 0) throw std::invalid_argument("scenario: N and P must be positive");
  if (N % P != 0) throw std::invalid_argument("scenario: P must divide N");
  if (!(Ts > 0.0)) throw std::invalid_argument("scenario: Ts must be positive");
  if (s < 0 || r < 0) throw std::invalid_argument("scenario: s and r must be >= 0");
  if (r > P) throw std::invalid_argument("scenario: r must be <= P");
  if (!(lambda > 0.0)) throw std::invalid_argument("scenario: lambda must be positive");
  if (!(impulse_scale > 0.0)) throw std::invalid_argument("scenario: impulse_scale must be positive");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("scenario: snr_db must be finite");
  if (grid_size != 0 && grid_size < P)
    throw std::invalid_argument("scenario: grid_size must be 0 or >= P");
  if (estimator != "panm" && estimator != "plm")
    throw std::invalid_argument("scenario: estimator must be panm or plm");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& line) {
  std::istringstream is(value);
  T out;
  is >> out;
  if (!is || !(is >> std::ws).eof())
    throw std::invalid_argument("scenario: bad value in line '" + line + "'");
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::map<std::string, bool> seen;
  Scenario sc;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("scenario: expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    seen[key] = true;

    if (key == "N") sc.N = parse_number<int>(value, stripped);
    else if (key == "P") sc.P = parse_number<int>(value, stripped);
    else if (key == "Ts") sc.Ts = parse_number<double>(value, stripped);
    else if (key == "s") sc.s = parse_number<int>(value, stripped);
    else if (key == "r") sc.r = parse_number<int>(value, stripped);
    else if (key == "snr_db") sc.snr_db = parse_number<double>(value, stripped);
    else if (key == "lambda") sc.lambda = parse_number<double>(value, stripped);
    else if (key == "seed") sc.seed = parse_number<std::uint64_t>(value, stripped);
    else if (key == "impulse_scale") sc.impulse_scale = parse_number<double>(value, stripped);
    else if (key == "estimator") sc.estimator = value;
    else if (key == "grid_size") sc.grid_size = parse_number<int>(value, stripped);
    else if (key == "epsilon") sc.epsilon = parse_number<double>(value, stripped);
    else if (key == "tol") sc.tol = parse_number<double>(value, stripped);
    else if (key == "max_iter") sc.max_iter = parse_number<int>(value, stripped);
    else throw std::invalid_argument("scenario: unknown key '" + key + "'");
  }
  for (const char* required : {"N", "P", "Ts", "s", "r", "snr_db", "lambda", "seed"})
    if (!seen.count(required))
      throw std::invalid_argument(std::string("scenario: missing required key '") + required +
                                  "'");
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_text(const Scenario& sc) {
  std::ostringstream os;
  os.precision(17);
  os << "N = " << sc.N << "\n"
     << "P = " << sc.P << "\n"
     << "Ts = " << sc.Ts << "\n"
     << "s = " << sc.s << "\n"
     << "r = " << sc.r << "\n"
     << "snr_db = " << sc.snr_db << "\n"
     << "lambda = " << sc.lambda << "\n"
     << "seed = " << sc.seed << "\n"
     << "impulse_scale = " << sc.impulse_scale << "\n"
     << "estimator = " << sc.estimator << "\n"
     << "grid_size = " << sc.grid_size << "\n";
  if (sc.epsilon) os << "epsilon = " << *sc.epsilon << "\n";
  os << "tol = " << sc.tol << "\n"
     << "max_iter = " << sc.max_iter << "\n";
  return os.str();
}

}  // namespace panm
