//! Build trigonometric expressions, simplify them and evaluate numerically.

use ntrailer::symbolic::{eval, simplify, to_latex, AngleSum, AngleVar, Bindings, ScalarExpr};

fn main() {
    let psi = AngleSum::var(AngleVar::yaw(1));
    let theta = AngleSum::var(AngleVar::steer(1, 2));

    // sin(psi) cos(theta) + cos(psi) sin(theta) contracts to sin(psi + theta).
    let e = ScalarExpr::sum(vec![
        ScalarExpr::sin(psi.clone()) * ScalarExpr::cos(theta.clone()),
        ScalarExpr::cos(psi.clone()) * ScalarExpr::sin(theta.clone()),
    ]);
    println!("{e}\n  => {}", simplify(&e));

    // Common factors cancel across a quotient.
    let l = ScalarExpr::param("a_1_2");
    let q = ScalarExpr::quotient(
        l.clone() * ScalarExpr::sin(theta.clone() - psi.clone()),
        l * ScalarExpr::cos(theta.clone()),
    )
    .unwrap();
    let q = simplify(&q);
    println!("{q}");

    let mut b = Bindings::default();
    b.set_angle(AngleVar::yaw(1), 0.1).set_angle(AngleVar::steer(1, 2), 0.3).set_param("a_1_2", 2.5);
    println!("value at psi_1 = 0.1, theta_1_2 = 0.3: {}", eval(&q, &b).unwrap());

    print!("{}", to_latex(&[("q".into(), q)]).render());
}
