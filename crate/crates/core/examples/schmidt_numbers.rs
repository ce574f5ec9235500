//! Schmidt numbers of coupled two-spin states and transport of one coupled
//! state onto another by U⊗U.

use spinpow::catalog::KnownGate;
use spinpow::linalg::re;
use spinpow::operators::coupled_state;
use spinpow::schmidt::{schmidt_of, schmidt_spectrum, schmidt_transport_check};
use spinpow::HalfInt;

fn main() -> spinpow::Result<()> {
    let h = HalfInt::from_twice;
    for twice in [2, 3] {
        let j = h(twice);
        for l in 0..=twice {
            let s = schmidt_spectrum(j, HalfInt::integer(l), HalfInt::ZERO)?;
            println!("j = {j}, |{l},0>: {:?}", s.iter().map(|x| (x * 1e9).round() / 1e9).collect::<Vec<_>>());
        }
    }

    let j = HalfInt::ONE;
    let src = (coupled_state(j, h(4), h(2))? * re(2f64.sqrt()) - coupled_state(j, h(4), h(-4))?) * re(1.0 / 3f64.sqrt());
    let dst = coupled_state(j, h(0), h(0))?;
    println!("source spectrum {:?}", schmidt_of(j, &src)?);
    println!("|<0,0| U_0' (x) U_0' |src>| = {:.12}", schmidt_transport_check(j, &KnownGate::J1Perm.gate(), &src, &dst)?);

    let j = h(3);
    let v = schmidt_transport_check(j, &KnownGate::J32Opt.gate(), &coupled_state(j, h(6), h(0))?, &coupled_state(j, h(2), h(0))?)?;
    println!("|<1,0| U_0 (x) U_0 |3,0>| = {v:.12}");
    Ok(())
}
