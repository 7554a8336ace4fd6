use kleinz::graph::{lattices, orientation_cover};
use kleinz::orient::{faces, Orientation};
use kleinz::poly::extract_p;
use num_complex::Complex64;

fn main() {
    // 1x2 square lattice P diagnostics
    let g = lattices::square_1x2(1.0, 1.0, 1.0, 1.0);
    let cover = orientation_cover(&g).unwrap();
    println!("cover edges:");
    for (i, e) in cover.edges.iter().enumerate() {
        println!("  e{i}: {}->{} w={} ta={} tb={} (orient {})", e.u, e.v, e.weight, e.a, e.b,
                 cover.orientation.as_ref().unwrap()[i]);
    }
    let co = Orientation::from_graph(&cover).unwrap();
    match extract_p(&cover, &co) {
        Ok(p) => {
            println!("P terms:");
            for t in p.terms() {
                println!("  z^{} w^{}: {:.4}", t.i, t.j, t.re);
            }
        }
        Err(e) => println!("extract_p failed: {e}"),
    }
    // expected: P = (w-1/w)^4 - 4(w-1/w)^2 + (2+z+1/z)
    let zt = Complex64::from_polar(1.0, 0.7);
    let wt = Complex64::from_polar(1.0, 1.1);
    let f = wt - 1.0/wt;
    println!("expected at test point: {}", f.powu(4) - 4.0*f.powu(2) + (2.0 + zt + 1.0/zt));

    // triangular faces diagnostics
    let t = lattices::triangular();
    let tc = orientation_cover(&t).unwrap();
    match faces(&tc) {
        Ok(fs) => {
            println!("triangular cover: V={} E={} F={}", tc.vertex_count, tc.edges.len(), fs.len());
            for f in &fs { println!("  face len {}: {:?}", f.len(), f); }
        }
        Err(e) => println!("faces failed: {e}"),
    }
    for (i, e) in tc.edges.iter().enumerate() {
        println!("  tcover e{i}: {}->{} ta={} tb={}", e.u, e.v, e.a, e.b);
    }
}
