#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pencilkit/pencil.hpp"

namespace pencilkit {

using json = nlohmann::json;

// Matrices in JSON are arrays of rows. Real entries are numbers, complex
// entries are [re, im] pairs. Non-finite doubles are written as the strings
// "inf", "-inf" and "nan" since JSON has no literal for them.

template <class Scalar>
json matrix_to_json(const Matrix<Scalar>& m);

/// Reads a rows x cols matrix. Throws InputError on shape or type errors,
/// and for complex entries when Scalar is real.
template <class Scalar>
Matrix<Scalar> matrix_from_json(const json& j, Index rows, Index cols, std::string_view what);

/// True if any entry of the row-array is a [re, im] pair.
bool json_matrix_is_complex(const json& j);

json real_to_json(double x);
double real_from_json(const json& j);

/// Pencil JSON schema:
///   {"schema_version":1, "m":int, "n":int, "field":"real"|"complex",
///    "E":[[...]], "A":[[...]]}
/// schema_version and field are optional on input; a missing field is
/// inferred from the entries.
template <class Scalar>
json pencil_to_json(const Pencil<Scalar>& p);
AnyPencil pencil_from_json(const json& j);

AnyPencil load_pencil_json(const std::filesystem::path& path);
void save_pencil_json(const AnyPencil& p, const std::filesystem::path& path);

/// Matrix Market, "array" or "coordinate" layout, real/integer/complex
/// entries, general/symmetric/skew-symmetric/hermitian symmetry.
struct MatrixMarketData {
  ComplexMatrix values;
  bool is_complex = false;
};
MatrixMarketData read_matrix_market(const std::filesystem::path& path);

/// Writes the dense "array" layout with %.17g entries.
template <class Scalar>
void write_matrix_market(const Matrix<Scalar>& m, const std::filesystem::path& path);

/// Loads E and A from a pair of Matrix Market files. The pencil is complex
/// if either file is.
AnyPencil load_pencil_matrix_market(const std::filesystem::path& path_e,
                                    const std::filesystem::path& path_a);

/// Hex SHA-256 over the field, shape and little-endian IEEE-754 bytes of E
/// then A in column-major order.
std::string input_digest(const AnyPencil& p);

/// Deterministic serialization: objects with sorted keys, two-space
/// indentation, arrays of scalars on one line, floats as %.17g.
std::string canonical_dump(const json& j);

/// Writes canonical_dump(j) plus a trailing newline. Throws InputError on
/// I/O failure.
void write_json_file(const json& j, const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);

} // namespace pencilkit
