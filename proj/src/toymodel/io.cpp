#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "relforge/error.hpp"
#include "relforge/toymodel.hpp"

namespace relforge::toymodel {

namespace {

// Layout: magic, '\n', u64 header length, JSON header, then little-endian
// doubles: student w, student b, teacher w, teacher b.

static_assert(std::endian::native == std::endian::little,
              "model files are written in host order, little-endian only");

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_doubles(std::ostream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_exact(std::istream& in, void* dst, std::size_t n, const std::string& what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw DataError(DataErrorKind::kParse, "model file truncated in " + what);
  }
}

void read_weights(std::istream& in, Weights& w, const std::string& what) {
  read_exact(in, w.w.data(), w.w.size() * sizeof(double), what);
  read_exact(in, w.b.data(), sizeof(double) * kNumClasses, what);
  for (double v : w.w) {
    if (!std::isfinite(v)) throw DataError(DataErrorKind::kParse, "non-finite weight in " + what);
  }
  for (double v : w.b) {
    if (!std::isfinite(v)) throw DataError(DataErrorKind::kParse, "non-finite bias in " + what);
  }
}

}  // namespace

void save_model(const ModelParams& params, const std::filesystem::path& path) {
  if (params.student.w.size() != params.teacher.w.size() ||
      params.student.bits != params.bits || params.teacher.bits != params.bits) {
    throw InternalError("student and teacher shapes differ");
  }
  nlohmann::ordered_json header;
  header["bits"] = params.bits;
  header["num_classes"] = kNumClasses;
  header["rng_seed"] = params.rng_seed;
  header["rows"] = params.student.rows();
  const std::string h = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write model file " + path.string());
  out.write(kModelMagic.data(), static_cast<std::streamsize>(kModelMagic.size()));
  out.put('\n');
  write_u64(out, h.size());
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const Weights* w : {&params.student, &params.teacher}) {
    write_doubles(out, w->w.data(), w->w.size());
    write_doubles(out, w->b.data(), kNumClasses);
  }
  out.flush();
  if (!out) throw DataError(DataErrorKind::kIo, "failed writing model file " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open model file " + path.string());
  std::string magic(kModelMagic.size() + 1, '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != std::string(kModelMagic) + "\n") {
    throw DataError(DataErrorKind::kParse,
                    path.string() + " is not a " + std::string(kModelMagic) + " model file");
  }
  std::uint64_t len = 0;
  read_exact(in, &len, sizeof len, "header length");
  if (len > (1u << 20)) throw DataError(DataErrorKind::kParse, "model header too large");
  std::string h(len, '\0');
  read_exact(in, h.data(), len, "header");

  ModelParams params;
  try {
    const auto header = nlohmann::json::parse(h);
    params.bits = header.at("bits").get<int>();
    params.rng_seed = header.at("rng_seed").get<std::uint64_t>();
    if (header.at("num_classes").get<int>() != kNumClasses) {
      throw DataError(DataErrorKind::kParse, "model file has an unsupported class count");
    }
    if (params.bits < 1 || params.bits > 30 ||
        header.at("rows").get<std::uint64_t>() != (std::uint64_t{1} << params.bits)) {
      throw DataError(DataErrorKind::kParse, "model header shape is inconsistent");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kParse, std::string("model header: ") + e.what());
  }
  params.student = Weights::zeros(params.bits);
  params.teacher = Weights::zeros(params.bits);
  read_weights(in, params.student, "student weights");
  read_weights(in, params.teacher, "teacher weights");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(DataErrorKind::kParse, "trailing bytes after model weights");
  }
  return params;
}

}  // namespace relforge::toymodel
