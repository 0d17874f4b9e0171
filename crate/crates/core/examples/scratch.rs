use entrospec::moments::{convert_basis, semicircle_moments, Basis};

fn main() {
    for m in [20usize, 25, 28, 30] {
        let mv = semicircle_moments(0.5, 0.5, m).unwrap();
        let cheb = convert_basis(&mv, Basis::Chebyshev).unwrap();
        let max = cheb.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        println!(
            "m={m:2}  max|cheb moment| = {max:.3e}   tail: {:?}",
            &cheb.values[m.saturating_sub(3)..]
        );
    }
}
