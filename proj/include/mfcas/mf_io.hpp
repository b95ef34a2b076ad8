#pragma once

#include "mfcas/mf.hpp"

namespace mfcas {

/// Canonical JSON text form of a factorization: field description,
/// variables with exact weights and roles, potentials and blocks as
/// graded-lex polynomial strings, optional grading.
std::string mf_to_json(const MFPtr& m);
MFPtr mf_from_json(const std::string& text);

void mf_save(const MFPtr& m, const std::string& path);
MFPtr mf_load(const std::string& path);

/// FNV-1a 64-bit checksum of a string (catalog transcription guard).
std::string fnv1a_hex(const std::string& data);

}  // namespace mfcas
