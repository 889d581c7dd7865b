use std::process::exit;

fn main() {
    // Behave like a normal Unix filter when stdout closes early
    // (e.g. piped into head): die on SIGPIPE instead of panicking
    // inside println!.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    exit(mmvc::cli::main_entry());
}
