// Prints the Friedrich, Kirchberg and Σ_r eigenvalue bounds for m = 1..7 at S = 2,
// marking the grades where the Σ_r bound meets the Kirchberg bound.
#include <kspin/bounds.hpp>

#include <iomanip>
#include <iostream>

int main()
{
    using namespace kspin;
    const Rational s = rat(2);
    std::cout << std::left << std::setw(4) << "m" << std::setw(10) << "Friedrich" << std::setw(10) << "Kirchberg" << "Sigma_r (r = 0..m)\n";
    for (int m = 1; m <= 7; ++m) {
        const Rational kb = kirchberg_bound(m, s);
        std::cout << std::setw(4) << m << std::setw(10) << to_string(friedrich_bound(2 * m, s)) << std::setw(10) << to_string(kb);
        for (int r = 0; r <= m; ++r) {
            const Rational b = sigma_r_bound(m, r, s);
            std::cout << to_string(b) << (b == kb ? "* " : "  ");
        }
        std::cout << "\n";
    }
    std::cout << "* Sigma_r bound equals the Kirchberg bound\n";
}
