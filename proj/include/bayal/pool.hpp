#ifndef BAYAL_POOL_HPP_
#define BAYAL_POOL_HPP_

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "bayal/types.hpp"

namespace bayal {

/// Labeled training rows: features plus 0/1 responses.
struct LabeledSet {
  MatrixXd X;  // n x p
  VectorXi y;  // n

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }

  void validate() const {
    if (X.rows() != y.size()) {
      throw std::invalid_argument("LabeledSet: feature/label row counts differ");
    }
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0 && y[i] != 1) {
        throw std::invalid_argument("LabeledSet: labels must be 0 or 1");
      }
    }
  }
};

/// Finite candidate pool for active learning. Ground-truth labels are held
/// for the whole pool but a label is only ever consulted through query().
class Pool {
 public:
  Pool() = default;

  Pool(MatrixXd features, VectorXi true_labels)
      : features_(std::move(features)), true_labels_(std::move(true_labels)) {
    if (features_.rows() != true_labels_.size()) {
      throw std::invalid_argument("Pool: feature/label row counts differ");
    }
    labeled_mask_.assign(static_cast<std::size_t>(features_.rows()), false);
  }

  Index N() const { return features_.rows(); }
  Index p() const { return features_.cols(); }

  const MatrixXd& features() const { return features_; }
  const VectorXi& true_labels() const { return true_labels_; }
  const std::vector<Index>& labeled_idx() const { return labeled_idx_; }
  const std::vector<Index>& initial_idx() const { return initial_idx_; }

  VectorXd row(Index i) const { return features_.row(i); }

  bool is_labeled(Index i) const { return labeled_mask_[static_cast<std::size_t>(i)]; }

  std::vector<Index> unlabeled_indices() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(N()) - labeled_idx_.size());
    for (Index i = 0; i < N(); ++i) {
      if (!is_labeled(i)) out.push_back(i);
    }
    return out;
  }

  Index n_unlabeled() const { return N() - static_cast<Index>(labeled_idx_.size()); }

  /// Reveals and records the label of an unlabeled point.
  int query(Index i) {
    check_index(i);
    if (is_labeled(i)) throw std::logic_error("Pool::query: point already labeled");
    labeled_mask_[static_cast<std::size_t>(i)] = true;
    labeled_idx_.push_back(i);
    return true_labels_[i];
  }

  /// Marks the warm-start subset; each index is queried as well.
  void set_initial(const std::vector<Index>& idx) {
    for (Index i : idx) {
      query(i);
      initial_idx_.push_back(i);
    }
  }

  MatrixXd labeled_features() const {
    MatrixXd X(static_cast<Index>(labeled_idx_.size()), p());
    for (std::size_t r = 0; r < labeled_idx_.size(); ++r) {
      X.row(static_cast<Index>(r)) = features_.row(labeled_idx_[r]);
    }
    return X;
  }

  LabeledSet labeled_set() const {
    LabeledSet s;
    s.X = labeled_features();
    s.y.resize(static_cast<Index>(labeled_idx_.size()));
    for (std::size_t r = 0; r < labeled_idx_.size(); ++r) {
      s.y[static_cast<Index>(r)] = true_labels_[labeled_idx_[r]];
    }
    return s;
  }

  /// Features of an arbitrary index list, one row each.
  MatrixXd rows(const std::vector<Index>& idx) const {
    MatrixXd X(static_cast<Index>(idx.size()), p());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      check_index(idx[r]);
      X.row(static_cast<Index>(r)) = features_.row(idx[r]);
    }
    return X;
  }

 private:
  void check_index(Index i) const {
    if (i < 0 || i >= N()) throw std::out_of_range("Pool: index out of range");
  }

  MatrixXd features_;
  VectorXi true_labels_;
  std::vector<Index> labeled_idx_;
  std::vector<Index> initial_idx_;
  std::vector<bool> labeled_mask_;
};

}  // namespace bayal

#endif  // BAYAL_POOL_HPP_
