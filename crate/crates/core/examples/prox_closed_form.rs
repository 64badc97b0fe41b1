//! The closed-form minimiser of ½|w − b|² + c|a1 w1 − a2 w2| and the branch
//! that produced it.

use gcsplit::local::prox_2x2_with_case;

fn main() {
    let draws = [
        (1.0, 0.5, 2.0, 0.3, 0.2),
        (1.0, 0.5, -2.0, 0.3, 0.2),
        (1.0, 1.0, 0.4, 0.3, 1.0),
        (0.0, 0.7, 0.4, 0.3, 0.5),
        (0.8, 0.0, 0.4, 0.3, 0.5),
    ];
    println!(
        "{:>6} {:>6} {:>6} {:>6} {:>5}   {:>9} {:>9}  case",
        "a1", "a2", "b1", "b2", "c", "w1", "w2"
    );
    for (a1, a2, b1, b2, c) in draws {
        let ((w1, w2), case) = prox_2x2_with_case(a1, a2, b1, b2, c);
        println!("{a1:>6} {a2:>6} {b1:>6} {b2:>6} {c:>5}   {w1:>9.5} {w2:>9.5}  {case:?}");
    }
}
