// Temporary diagnostic: inspect restricted trapezoid complexity.
use trapgen::core::*;
use trapgen::restrictor::restrict;
use trapgen::sampler::{Sampler, SamplerConfig};

fn main() {
    let dims = 10u32;
    let vars = VarTable::with_integer_dims(dims);
    let mut intervals = Vec::new();
    let mut witness_vals = vec![];
    for i in 0..dims {
        witness_vals.push(1i64 + (i as i64 % 3));
    }
    let witness = Vector::from_i64s(&witness_vals);
    for di in (1..=dims).rev() {
        let v = Dim::new(di);
        let target = witness.value(v).clone();
        if di == 1 {
            intervals.push(Interval::pair(
                Bound::new(v, RelOp::Geq, Poly::from_constant(rat_int(-10))),
                Bound::new(v, RelOp::Leq, Poly::from_constant(rat_int(10))),
            ));
            continue;
        }
        let prev = Dim::new(di - 1);
        let base = Poly::with_terms(rat(1, 2), [(prev, rat(1, 2))]);
        let shift = &target - base.eval(&witness);
        if di % 3 == 0 {
            intervals.push(Interval::equality(Bound::new(
                v,
                RelOp::Eq,
                base.add_constant(&shift),
            )));
        } else {
            intervals.push(Interval::pair(
                Bound::new(v, RelOp::Geq, base.add_constant(&(&shift - rat(3, 2)))),
                Bound::new(v, RelOp::Leq, base.add_constant(&(&shift + rat(5, 2)))),
            ));
        }
    }
    let t = Trapezoid::from_intervals(intervals);
    assert!(t.eval(&witness));
    let res = restrict(&t, &witness, &vars).unwrap();
    for iv in res.trapezoid.intervals() {
        for b in iv.bounds() {
            let max_digits = b
                .poly()
                .terms()
                .map(|(_, c)| c.numer().to_string().len().max(c.denom().to_string().len()))
                .max()
                .unwrap_or(0);
            println!(
                "dim {} op {:?} terms {} maxdigits {}",
                iv.var().index(),
                b.op(),
                b.poly().terms().count(),
                max_digits
            );
        }
    }
    let mut s = Sampler::new(SamplerConfig::with_seed(1));
    let start = std::time::Instant::now();
    let n = 20000;
    for _ in 0..n {
        s.sample_original(&res, &vars).unwrap();
    }
    let el = start.elapsed().as_secs_f64();
    println!(
        "{} vectors in {:.3}s = {:.0} vec/s = {:.0} values/s",
        n,
        el,
        n as f64 / el,
        n as f64 * dims as f64 / el
    );
}
