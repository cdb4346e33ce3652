use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, stdout, stderr) = toric_stab::cli::run(&argv);
    print!("{stdout}");
    eprint!("{stderr}");
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
