//! Drive the command-line front end from code and capture its output.

fn main() {
    let mut out = Vec::new();
    let code = eigensteer::cli::run(
        ["eigensteer", "cost", "--problem", "varcoeff-x", "--tgrid", "0.1,0.5,1"],
        &mut out,
    );
    print!("{}", String::from_utf8_lossy(&out));
    println!("exit code {code}");
}
