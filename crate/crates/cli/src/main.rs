use std::io::{self, Write};

fn main() {
    let stdin = io::stdin();
    let (mut input, mut out, mut err) = (stdin.lock(), io::stdout(), io::stderr());
    let code = astd_cli::run(
        std::env::args_os(),
        &mut astd_cli::Io {
            input: &mut input,
            out: &mut out,
            err: &mut err,
        },
    );
    let _ = out.flush();
    std::process::exit(code);
}
