//! Writes polytopes in PALP format and reads them back.
use torifan::polytope::{cube, emit_palp, parse_palp};
use torifan::verify::data::octahedron;

fn main() -> torifan::Result<()> {
    let ps = vec![cube(), octahedron().base().clone()];
    let mut buf = Vec::new();
    emit_palp(&ps, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    let back = parse_palp(buf.as_slice(), true)?;
    assert_eq!(back.polytopes, ps);
    println!("read back {} polytopes", back.polytopes.len());
    Ok(())
}
