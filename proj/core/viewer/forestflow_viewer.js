// Default interactive layer for forestflow Sankey documents: hover a block to
// highlight its incident links, hover a link for its path count. The full
// viewer (threshold slider, class selection) replaces this file at build time
// via FORESTFLOW_VIEWER_BUNDLE.
(function () {
  "use strict";
  var island = document.getElementById("flow-data");
  var svg = document.getElementById("flow-sankey");
  var tip = document.getElementById("flow-tooltip");
  if (!island || !svg) return;
  var doc;
  try {
    doc = JSON.parse(island.textContent);
  } catch (e) {
    doc = null;
  }
  if (!doc || doc.format_version !== "1") {
    var panel = document.createElement("div");
    panel.className = "flow-error";
    panel.textContent = "Unsupported flow document version: " +
        (doc ? String(doc.format_version) : "unreadable");
    svg.parentNode.replaceChild(panel, svg);
    return;
  }
  var links = svg.querySelectorAll(".link");
  function clear() {
    for (var i = 0; i < links.length; i++) links[i].classList.remove("hl");
    if (tip) tip.style.display = "none";
  }
  function titleOf(el) {
    var t = el.querySelector("title");
    return t ? t.textContent : "";
  }
  svg.addEventListener("mouseover", function (ev) {
    var el = ev.target;
    clear();
    if (el.classList.contains("block")) {
      var id = el.getAttribute("data-id");
      for (var i = 0; i < links.length; i++) {
        if (links[i].getAttribute("data-from") === id || links[i].getAttribute("data-to") === id) {
          links[i].classList.add("hl");
        }
      }
    } else if (el.classList.contains("link")) {
      el.classList.add("hl");
      if (tip) {
        tip.textContent = titleOf(el);
        tip.style.display = "block";
      }
    }
  });
  svg.addEventListener("mousemove", function (ev) {
    if (tip && tip.style.display === "block") {
      tip.style.left = ev.pageX + 12 + "px";
      tip.style.top = ev.pageY + 12 + "px";
    }
  });
  svg.addEventListener("mouseleave", clear);
})();
