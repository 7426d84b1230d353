#pragma once

#include <optional>

#include "spectra2d/signal_model.hpp"

namespace spectra2d {

struct HermitianEig {
    Eigen::VectorXd values;  // ascending
    CMatrix vectors;         // columns match values
};

/// Eigenpairs of a Hermitian matrix (only the lower triangle is read).
/// With `lower_bound`, only eigenvalues strictly above it are computed.
/// Throws std::runtime_error on non-finite input or solver failure.
HermitianEig hermitian_eig(const CMatrix& a, std::optional<double> lower_bound = std::nullopt);

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a);

}  // namespace spectra2d
