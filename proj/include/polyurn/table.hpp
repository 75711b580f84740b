#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace polyurn {

// Dense row-major matrix sized particles x edges (or any small fixed shape).
template <typename T>
class Table {
public:
    Table() = default;
    Table(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Table: negative shape");
    }

    T& operator()(int r, int c) { return data_[index(r, c)]; }
    const T& operator()(int r, int c) const { return data_[index(r, c)]; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void fill(T value) { data_.assign(data_.size(), value); }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    friend bool operator==(const Table&, const Table&) = default;

private:
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * cols_ + c;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

}  // namespace polyurn
