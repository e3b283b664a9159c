#include "epvi/model.hpp"

namespace epvi {

Dataset Dataset::select(std::span<const std::size_t> idx) const {
    Dataset out;
    out.family = family;
    out.rows = idx.size();
    out.features = features;
    out.outputs = outputs;
    out.x.reserve(idx.size() * static_cast<std::size_t>(features));
    out.y.reserve(idx.size() * static_cast<std::size_t>(outputs));
    for (const std::size_t r : idx) {
        if (r >= rows) throw std::out_of_range("Dataset::select: row index out of range");
        const auto xr = x_row(r);
        out.x.insert(out.x.end(), xr.begin(), xr.end());
        const auto yr = y_row(r);
        out.y.insert(out.y.end(), yr.begin(), yr.end());
    }
    return out;
}

}  // namespace epvi
