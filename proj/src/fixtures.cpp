#include "wipmf/fixtures.hpp"

namespace wipmf::fixtures {

namespace {

// Published values carry 8 digits, so rows are off by up to 1e-8.
Matrix rows_normalized(std::initializer_list<std::initializer_list<double>> rows) {
    const int d = static_cast<int>(rows.size());
    Matrix P(d, d);
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (double v : r) P(i, j++) = v;
        ++i;
    }
    for (int k = 0; k < d; ++k) P.row(k) /= P.row(k).sum();
    return P;
}

Vector vec(std::initializer_list<double> v) {
    Vector out(v.size());
    int i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

} // namespace

BanditModel reference3() {
    BanditModel m;
    m.P0 = rows_normalized({{0.30368587, 0.25184515, 0.44446898},
                            {0.40839084, 0.41334941, 0.17825975},
                            {0.66146205, 0.18408290, 0.15445505}});
    m.P1 = rows_normalized({{0.23763148, 0.42381178, 0.33855674},
                            {0.54401527, 0.27028947, 0.18569526},
                            {0.06938943, 0.38776507, 0.54284550}});
    m.R0 = Vector::Zero(3);
    m.R1 = vec({0.99663977, 0.22770951, 0.17300611});
    return m;
}

BanditModel cycle_example(int k) {
    BanditModel m;
    m.R0 = Vector::Zero(3);
    switch (k) {
    case 1:
        m.P0 = rows_normalized({{0.5214073, 0.40392496, 0.07466774},
                                {0.0158415, 0.21455666, 0.76960184},
                                {0.53722329, 0.37651148, 0.08626522}});
        m.P1 = rows_normalized({{0.24639364, 0.23402385, 0.51958251},
                                {0.49681581, 0.49509821, 0.00808597},
                                {0.37826553, 0.15469252, 0.46704195}});
        m.R1 = vec({0.72232506, 0.18844869, 0.25752477});
        break;
    case 2:
        m.P0 = rows_normalized({{0.02232142, 0.10229283, 0.87538575},
                                {0.03426605, 0.17175704, 0.79397691},
                                {0.52324756, 0.45523298, 0.02151947}});
        m.P1 = rows_normalized({{0.14874601, 0.30435809, 0.54689589},
                                {0.56845754, 0.41117331, 0.02036915},
                                {0.25265570, 0.27310439, 0.47423991}});
        m.R1 = vec({0.37401552, 0.11740814, 0.07866135});
        break;
    case 3:
        m.P0 = rows_normalized({{0.47819592, 0.02090623, 0.50089785},
                                {0.08063373, 0.15456935, 0.76479692},
                                {0.66552514, 0.08481946, 0.24965540}});
        m.P1 = rows_normalized({{0.00279465, 0.37327924, 0.62392611},
                                {0.51582335, 0.46333908, 0.02083756},
                                {0.41875202, 0.17776712, 0.40348086}});
        m.R1 = vec({0.97658608, 0.53014109, 0.40394919});
        break;
    default:
        throw Error("cycle_example: k must be 1, 2 or 3");
    }
    return m;
}

BanditModel singular2() {
    BanditModel m;
    m.P0 = Matrix::Constant(2, 2, 0.5);
    m.P1 = m.P0;
    m.R0 = Vector::Zero(2);
    m.R1 = vec({1.0, 0.0});
    return m;
}

} // namespace wipmf::fixtures
