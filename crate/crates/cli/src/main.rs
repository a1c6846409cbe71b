use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = gdist_cli::run(std::env::args_os(), &mut out, &mut io::stderr());
    if out.flush().is_err() && code == 0 {
        std::process::exit(1);
    }
    drop(out);
    std::process::exit(code);
}
