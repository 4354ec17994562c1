// Packed GF(2) vectors and matrices: elimination, solving, inversion.

use sapir::gf2::{BitMatrix, BitVec, EchelonBasis};

pub fn run_example() -> sapir::Result<()> {
    let a = BitMatrix::parse_rows(&["1101", "0110", "1011"])?;
    let (reduced, pivots) = a.rref();
    println!(
        "A =\n{a:?}\nrref(A) =\n{reduced:?}\npivots {pivots:?}, rank {}",
        a.rank()
    );

    // Free variables are set to zero, so the solution is canonical.
    let rhs = BitVec::parse_bits("101")?;
    let x = a.solve(&rhs)?;
    println!("A x = {rhs} has canonical solution x = {x}");
    assert_eq!(a.mul_vec(&x), rhs);

    let square = BitMatrix::parse_rows(&["110", "011", "001"])?;
    let inverse = square.try_invert()?;
    assert_eq!(square.mul(&inverse), BitMatrix::identity(3));
    println!("inverse of\n{square:?}\nis\n{inverse:?}");

    let mut basis = EchelonBasis::new(4);
    for row in a.row_slice() {
        basis.insert(row.clone());
    }
    let probe = BitVec::parse_bits("1011")?;
    println!(
        "row space has rank {}; contains {probe}: {}",
        basis.rank(),
        basis.contains(&probe)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> sapir::Result<()> {
    run_example()
}
