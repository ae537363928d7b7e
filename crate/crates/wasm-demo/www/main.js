// Built with `wasm-pack build --target web --out-dir www/pkg` from the crate root.
import init, { Demo } from "./pkg/seiguard_wasm_demo.js";

const $ = (id) => document.getElementById(id);

function show(el, f) {
  try {
    el.classList.remove("err");
    el.textContent = f();
  } catch (e) {
    el.classList.add("err");
    el.textContent = String(e.message ?? e);
  }
}

await init();
const demo = new Demo();

$("reg").addEventListener("submit", (ev) => {
  ev.preventDefault();
  const f = new FormData(ev.target);
  show($("stored"), () => {
    const [phone, lastname, firstname] = JSON.parse(
      demo.register(f.get("password"), f.get("phone"), f.get("lastname"), f.get("firstname")),
    );
    return `c_phone = ${phone}\nc_ln    = ${lastname}\nc_fn    = ${firstname}`;
  });
});

$("login").addEventListener("submit", (ev) => {
  ev.preventDefault();
  const pw = new FormData(ev.target).get("password");
  show($("decoded"), () => {
    const r = JSON.parse(demo.login(pw));
    return r ? `phone ${r.phone}\nname  ${r.name}` : "register first";
  });
});

$("hist").addEventListener("submit", (ev) => {
  ev.preventDefault();
  const f = new FormData(ev.target);
  show($("chi"), () => {
    const h = JSON.parse(demo.histogram(Number(f.get("samples")), Number(f.get("buckets"))));
    const max = Math.max(...h.counts);
    $("bars").replaceChildren(
      ...h.counts.map((c) => {
        const d = document.createElement("div");
        d.style.height = `${(100 * c) / max}%`;
        d.title = String(c);
        return d;
      }),
    );
    return `chi2 = ${h.statistic.toFixed(2)}, dof = ${h.dof}, p = ${h.p_value.toFixed(4)}`;
  });
});

$("block").addEventListener("submit", (ev) => {
  ev.preventDefault();
  const name = new FormData(ev.target).get("firstname");
  show($("blockout"), () => {
    const b = JSON.parse(demo.block(name));
    const where = b.main_part ? "main part" : "not yet seen (would get a minimum block)";
    return `${b.message}: ${where}\nstart ${b.start}\nsize  ${b.size}\nshare ${b.share.toExponential(3)}`;
  });
});
