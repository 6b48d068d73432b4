use classdiv::construct::*;
use classdiv::qform;
use std::time::Instant;

fn run(g: u32, x: u64, t: u64) {
    let lift = lift_progression(0, 3, g, LiftCase::Case1).unwrap();
    let neg_a = (lift.b_prime as i64 - lift.a_prime as i64).rem_euclid(lift.b_prime as i64);
    let t0 = Instant::now();
    let (w, stream) = case1_search(x, t, g, neg_a, lift.b_prime).unwrap();
    println!("g={g} X={x} T={t}: {} emissions (search {:?}), witness t1={}",
             stream.len(), t0.elapsed(), w.t1);
    let ds: std::collections::BTreeSet<u64> = stream.iter().map(|c| c.d).collect();
    let (sf, nsf) = squarefree_filter(ds.iter().copied(), x);
    println!("  distinct D: {} ({} squarefree, {} not)", ds.len(), sf.len(), nsf.len());
    if let Some(&d) = sf.first() {
        let t1 = Instant::now();
        let disc = qform::discriminant_of(d).unwrap();
        let ok = qform::has_element_of_order(&disc, (g/2) as u64);
        println!("  oracle on smallest sf D={d}: {ok} in {:?}", t1.elapsed());
    }
    if let Some(&d) = sf.last() {
        let t1 = Instant::now();
        let disc = qform::discriminant_of(d).unwrap();
        let ok = qform::has_element_of_order(&disc, (g/2) as u64);
        println!("  oracle on largest  sf D={d}: {ok} in {:?}", t1.elapsed());
    }
}

fn main() {
    run(6, 1_000_000, 15);
    run(6, 100_000_000, 156);
    run(10, 100_000_000, 39);
    run(10, 1_000_000_000, 123);
}
